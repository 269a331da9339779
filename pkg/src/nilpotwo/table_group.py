"""Small groups as explicit multiplication tables, and the exhaustive oracles built on them.

Subgroups are stored as Python ints used as bitmasks over element indices
(bit ``i`` set iff element ``i`` is a member); element 0 is always the identity.
``table[i][j]`` is the index of ``e_i * e_j`` (left-to-right, as for permutations).
"""

import random
from .config import CAPS
from .errors import CapExceededError, ParseError
from .permutation import Permutation, array_order, mul


def bits(mask):
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _is_prime(k):
    if k < 2:
        return False
    i = 2
    while i * i <= k:
        if k % i == 0:
            return False
        i += 1
    return True


def prime_factors(n):
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


class SubgroupSet:
    """A subgroup of a :class:`TableGroup`: member bitmask plus a generating set."""

    __slots__ = ("parent", "mask", "members", "gens")

    def __init__(self, parent, mask, members, gens):
        self.parent = parent
        self.mask = mask
        self.members = tuple(sorted(members))
        self.gens = tuple(gens)

    @property
    def order(self):
        return len(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, x):
        return bool(self.mask >> x & 1)

    def __eq__(self, other):
        return isinstance(other, SubgroupSet) and self.parent is other.parent and self.mask == other.mask

    def __hash__(self):
        return hash(self.mask)

    def sort_key(self):
        return (len(self.members), self.members)

    def __repr__(self):
        return f"<SubgroupSet order={self.order} gens={self.gens}>"


class TableGroup:
    """A finite group given by its Cayley table.

    ``elements`` holds the permutation arrays when the table came from a
    permutation group, so subgroups can be mapped back.
    """

    def __init__(self, table, elements=None, generators=None, validate=True):
        self.n = len(table)
        self.table = [list(row) for row in table]
        if validate:
            check_latin_square(self.table)
            check_associative(self.table)
        t = self.table
        self.inverse = [row.index(0) for row in t]
        self.elements = elements
        self._orders = None
        if generators is None:
            generators = self.small_generating_set(minimal=False)
        self.generators = tuple(generators)

    # -- basic element arithmetic --

    def mul(self, a, b):
        return self.table[a][b]

    def conj(self, x, g):
        """``g^-1 x g``."""
        t = self.table
        return t[t[self.inverse[g]][x]][g]

    def comm(self, a, b):
        t, iv = self.table, self.inverse
        return t[t[iv[a]][iv[b]]][t[a][b]]

    @property
    def orders(self):
        if self._orders is None:
            t = self.table
            out = [1] * self.n
            for x in range(1, self.n):
                k, y = 1, x
                while y != 0:
                    y = t[y][x]
                    k += 1
                out[x] = k
            self._orders = out
        return self._orders

    @property
    def full_mask(self):
        return (1 << self.n) - 1

    # -- closures --

    def close(self, gens, start=(0,)):
        """Subgroup generated by ``gens`` (indices); returns (mask, element list)."""
        t = self.table
        elems = list(start)
        mask = 0
        for e in elems:
            mask |= 1 << e
        gens = [g for g in gens if g != 0]
        i = 0
        while i < len(elems):
            row = t[elems[i]]
            for g in gens:
                x = row[g]
                if not mask >> x & 1:
                    mask |= 1 << x
                    elems.append(x)
            i += 1
        return mask, elems

    def subgroup(self, gens):
        gens = tuple(g for g in gens if g != 0)
        mask, elems = self.close(gens)
        return SubgroupSet(self, mask, elems, gens)

    def whole(self):
        return self.subgroup(self.generators)

    def trivial(self):
        return SubgroupSet(self, 1, [0], ())

    def normal_closure(self, seeds, conj_gens):
        """Smallest subgroup containing ``seeds`` and normalized by ``conj_gens``."""
        gens = [s for s in seeds if s != 0]
        mask, elems = self.close(gens)
        queue = list(gens)
        while queue:
            e = queue.pop()
            for g in conj_gens:
                c = self.conj(e, g)
                if not mask >> c & 1:
                    gens.append(c)
                    queue.append(c)
                    mask, elems = self.close(gens)
        return SubgroupSet(self, mask, elems, gens)

    def normalizes(self, x, sub):
        return all(sub.mask >> self.conj(h, x) & 1 for h in sub.gens)

    def is_normal(self, sub, ambient=None):
        gens = self.generators if ambient is None else ambient.gens
        return all(self.normalizes(g, sub) for g in gens)

    def derived_subgroup(self, sub):
        g = sub.gens
        comms = [self.comm(a, b) for i, a in enumerate(g) for b in g[i + 1 :]]
        return self.normal_closure(comms, g)

    def commutator_subgroup(self, a, b):
        """[A, B] for subgroups normalized by ``b``'s generators (used for lower central series)."""
        comms = [self.comm(x, y) for x in a.gens for y in b.gens]
        return self.normal_closure(comms, b.gens)

    def is_abelian_sub(self, sub):
        g = sub.gens
        t = self.table
        return all(t[a][b] == t[b][a] for i, a in enumerate(g) for b in g[i + 1 :])

    def centralizer_mask(self, sub, within=None):
        t = self.table
        cand = range(self.n) if within is None else within.members
        mask = 0
        for x in cand:
            if all(t[x][h] == t[h][x] for h in sub.gens):
                mask |= 1 << x
        return mask

    def center(self, sub=None):
        sub = self.whole() if sub is None else sub
        mask = self.centralizer_mask(sub, within=sub)
        elems = bits(mask)
        return SubgroupSet(self, mask, elems, self._gens_for_mask(mask, elems))

    def _gens_for_mask(self, mask, elems):
        gens = []
        cur = 1
        for x in elems:
            if not cur >> x & 1:
                gens.append(x)
                cur, _ = self.close(gens)
        return gens

    def derived_series(self, sub=None):
        sub = self.whole() if sub is None else sub
        terms = [sub]
        while True:
            d = self.derived_subgroup(terms[-1])
            if d.mask == terms[-1].mask:
                break
            terms.append(d)
            if d.order == 1:
                break
        return terms

    def lower_central_series(self, sub=None):
        sub = self.whole() if sub is None else sub
        terms = [sub]
        while True:
            nxt = self.commutator_subgroup(terms[-1], sub)
            if nxt.mask == terms[-1].mask:
                break
            terms.append(nxt)
            if nxt.order == 1:
                break
        return terms

    def nilpotency_class(self, sub=None):
        lcs = self.lower_central_series(sub)
        if lcs[-1].order != 1:
            return None
        return len(lcs) - 1

    def is_solvable(self):
        return self.derived_series()[-1].order == 1

    def small_generating_set(self, minimal=True):
        """A generating set; minimum-size when it has at most two elements, else greedy."""
        n = self.n
        if n == 1:
            return ()
        orders = self.orders
        for x in range(n):
            if orders[x] == n:
                return (x,)
        if minimal and n <= CAPS.automorphism * 4:
            # a generating pair can be conjugated so that x is a class representative
            for x in self.class_representatives()[1:]:
                mx, _ = self.close([x])
                for y in range(x + 1, n):
                    if mx >> y & 1:
                        continue
                    m, elems = self.close([x, y])
                    if len(elems) == n:
                        return (x, y)
        gens = []
        mask = 1
        size = 1
        while size < n:
            best = None
            for x in range(n):
                if mask >> x & 1:
                    continue
                m, elems = self.close(gens + [x])
                if best is None or len(elems) > best[1]:
                    best = (x, len(elems), m)
            gens.append(best[0])
            size, mask = best[1], best[2]
        return tuple(gens)

    def conjugacy_classes(self):
        seen = [False] * self.n
        classes = []
        for x in range(self.n):
            if seen[x]:
                continue
            cls = [x]
            seen[x] = True
            i = 0
            while i < len(cls):
                for g in self.generators:
                    c = self.conj(cls[i], g)
                    if not seen[c]:
                        seen[c] = True
                        cls.append(c)
                i += 1
            classes.append(sorted(cls))
        return classes

    def class_representatives(self):
        return [c[0] for c in self.conjugacy_classes()]

    def relabel(self, sigma):
        """Copy of the table with element ``i`` renamed ``sigma[i]`` (``sigma[0]`` must be 0)."""
        if sigma[0] != 0:
            raise ValueError("relabeling must fix the identity")
        n = self.n
        new = [[0] * n for _ in range(n)]
        t = self.table
        for i in range(n):
            si = sigma[i]
            row = t[i]
            for j in range(n):
                new[si][sigma[j]] = sigma[row[j]]
        elements = None
        if self.elements is not None:
            elements = [None] * n
            for i in range(n):
                elements[sigma[i]] = self.elements[i]
        return TableGroup(new, elements, [sigma[g] for g in self.generators], validate=False)

    def to_generated(self):
        """Right regular representation as a permutation group of degree n."""
        from .chain import GeneratedGroup

        t = self.table
        gens = [tuple(t[i][g] for i in range(self.n)) for g in self.generators]
        return GeneratedGroup(gens, self.n)

    def mask_of(self, perms):
        """Bitmask of the given permutations (requires ``elements``)."""
        index = self._element_index()
        mask = 0
        for p in perms:
            a = p.array if isinstance(p, Permutation) else p
            mask |= 1 << index[a]
        return mask

    def _element_index(self):
        if self.elements is None:
            raise ValueError("table has no permutation elements attached")
        if not hasattr(self, "_index"):
            self._index = {a: i for i, a in enumerate(self.elements)}
        return self._index

    def subgroup_perms(self, sub):
        return [Permutation._raw(self.elements[i]) for i in sub.gens]


def check_latin_square(table):
    n = len(table)
    if n == 0:
        raise ValueError("empty table")
    full = list(range(n))
    for i, row in enumerate(table):
        if len(row) != n:
            raise ValueError(f"row {i} has length {len(row)}, expected {n}")
        if sorted(row) != full:
            raise ValueError(f"row {i} is not a permutation of 0..{n - 1}")
    for j in range(n):
        if sorted(table[i][j] for i in range(n)) != full:
            raise ValueError(f"column {j} is not a permutation of 0..{n - 1}")
    if list(table[0]) != full or [table[i][0] for i in range(n)] != full:
        raise ValueError("element 0 is not the identity")


def check_associative(table, exhaustive_cap=None, samples=None, seed=0):
    n = len(table)
    exhaustive_cap = CAPS.associativity_exhaustive if exhaustive_cap is None else exhaustive_cap
    samples = CAPS.associativity_samples if samples is None else samples
    t = table
    if n <= exhaustive_cap:
        for a in range(n):
            ta = t[a]
            for b in range(n):
                ab = ta[b]
                tab = t[ab]
                tb = t[b]
                for c in range(n):
                    if tab[c] != ta[tb[c]]:
                        raise ValueError(f"not associative at ({a}, {b}, {c})")
        return
    rng = random.Random(seed)
    for _ in range(samples):
        a, b, c = rng.randrange(n), rng.randrange(n), rng.randrange(n)
        if t[t[a][b]][c] != t[a][t[b][c]]:
            raise ValueError(f"not associative at ({a}, {b}, {c})")


def from_generated(group, cap=None):
    """Cayley table of a permutation group, elements enumerated breadth-first over its generators."""
    cap = CAPS.table_order if cap is None else cap
    if group.order > cap:
        raise CapExceededError("table order", group.order, cap)
    gens = list(group.generator_arrays)
    ident = tuple(range(group.degree))
    elems = [ident]
    index = {ident: 0}
    parent = [(-1, -1)]
    right = []
    i = 0
    while i < len(elems):
        e = elems[i]
        row = []
        for k, g in enumerate(gens):
            x = mul(e, g)
            j = index.get(x)
            if j is None:
                j = len(elems)
                index[x] = j
                elems.append(x)
                parent.append((i, k))
            row.append(j)
        right.append(row)
        i += 1
    n = len(elems)
    if n != group.order:
        raise AssertionError(f"closure found {n} elements, chain says {group.order}")
    # table[i][j] = e_i * e_j, with e_j = e_parent * g_k  =>  table[i][j] = right[table[i][parent]][k]
    table = [[0] * n for _ in range(n)]
    for r in range(n):
        row = table[r]
        row[0] = r
        for j in range(1, n):
            pj, k = parent[j]
            row[j] = right[row[pj]][k]
    gen_idx = []
    for k in range(len(gens)):
        g = right[0][k]
        if g != 0 and g not in gen_idx:
            gen_idx.append(g)
    tg = TableGroup(table, elems, gen_idx, validate=False)
    tg._index = index
    return tg


def parse_table(text):
    """Parse the table file format: ``n`` on line 1, then ``n`` rows of ``n`` indices."""
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty table file", 1, 1)
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise ParseError(f"expected the order, got {lines[0]!r}", 1, 1) from None
    if n < 1:
        raise ParseError("order must be positive", 1, 1)
    rows = []
    for r in range(n):
        ln = r + 2
        if ln - 1 >= len(lines):
            raise ParseError(f"missing row {r}", ln, 1)
        fields = lines[ln - 1].split()
        if len(fields) != n:
            raise ParseError(f"row {r} has {len(fields)} entries, expected {n}", ln, 1)
        row = []
        col = 1
        raw = lines[ln - 1]
        for f in fields:
            col = raw.index(f, col - 1) + 1
            if not f.isdigit() or int(f) >= n:
                raise ParseError(f"bad entry {f!r}", ln, col)
            row.append(int(f))
            col += len(f)
        rows.append(row)
    for extra, line in enumerate(lines[n + 1 :], start=n + 2):
        if line.strip():
            raise ParseError("trailing content after the table", extra, 1)
    try:
        check_latin_square(rows)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    try:
        check_associative(rows)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    return TableGroup(rows, validate=False)


def format_table(g):
    out = [str(g.n)]
    out.extend(" ".join(map(str, row)) for row in g.table)
    return "\n".join(out) + "\n"


# -- subgroup enumeration --


def enumerate_subgroups(g, cap=None):
    """Every subgroup exactly once, sorted by (order, member list).

    Solvable groups use cyclic extension: each subgroup ``H`` is extended by
    elements ``x`` normalizing it with ``x^p ∈ H`` for a prime ``p``.  That
    reaches every subgroup of a solvable group.  Non-solvable groups (which
    have perfect subgroups cyclic extension cannot reach) fall back to joining
    every found subgroup with every cyclic subgroup.
    """
    cap = CAPS.subgroup_enumeration if cap is None else cap
    if g.n > cap:
        raise CapExceededError("subgroup enumeration of order", g.n, cap)
    if g.is_solvable():
        subs = _cyclic_extension(g)
    else:
        subs = _join_closure(g)
    return sorted(subs, key=SubgroupSet.sort_key)


def _cyclic_extension(g):
    t = g.table
    n = g.n
    found = {1: g.trivial()}
    queue = [found[1]]
    qi = 0
    while qi < len(queue):
        h = queue[qi]
        qi += 1
        hmask = h.mask
        covered = hmask
        for x in range(1, n):
            if covered >> x & 1:
                continue
            k, y = 1, x
            while not hmask >> y & 1:
                y = t[y][x]
                k += 1
            if not _is_prime(k) or not g.normalizes(x, h):
                continue
            powers = [0]
            for _ in range(k - 1):
                powers.append(t[powers[-1]][x])
            elems = [t[e][p] for p in powers for e in h.members]
            mask = 0
            for e in elems:
                mask |= 1 << e
            covered |= mask
            if mask not in found:
                sub = SubgroupSet(g, mask, elems, h.gens + (x,))
                found[mask] = sub
                queue.append(sub)
    return list(found.values())


def _join_closure(g):
    cyclic = {}
    for x in range(1, g.n):
        m, _ = g.close([x])
        cyclic.setdefault(m, x)
    found = {1: g.trivial()}
    queue = [found[1]]
    qi = 0
    while qi < len(queue):
        h = queue[qi]
        qi += 1
        for cmask, x in cyclic.items():
            if cmask & ~h.mask == 0:
                continue
            mask, elems = g.close(h.gens + (x,), start=h.members)
            if mask not in found:
                sub = SubgroupSet(g, mask, elems, h.gens + (x,))
                found[mask] = sub
                queue.append(sub)
    return list(found.values())


def max_abelian_section(g, subgroups=None):
    """``max |H/H'|`` over all subgroups H, and every H attaining it (sorted by order, members)."""
    subs = enumerate_subgroups(g) if subgroups is None else subgroups
    best = 0
    witnesses = []
    for h in subs:
        value = h.order // g.derived_subgroup(h).order
        if value > best:
            best, witnesses = value, [h]
        elif value == best:
            witnesses.append(h)
    witnesses.sort(key=SubgroupSet.sort_key)
    return best, witnesses


# -- exhaustive structural oracles (ground truth for the chain-based algorithms) --


def normal_subgroups(g, subgroups=None):
    subs = enumerate_subgroups(g) if subgroups is None else subgroups
    return [h for h in subs if g.is_normal(h)]


def minimal_normal_subgroups(g, subgroups=None):
    normals = [h for h in normal_subgroups(g, subgroups) if h.order > 1]
    out = []
    for h in normals:
        if not any(k.mask != h.mask and k.mask & ~h.mask == 0 for k in normals):
            out.append(h)
    return out


def fitting_oracle(g, subgroups=None):
    best = g.trivial()
    for h in normal_subgroups(g, subgroups):
        if h.order > best.order and g.nilpotency_class(h) is not None:
            best = h
    return best


def sylow_orders_oracle(g, subgroups=None):
    subs = enumerate_subgroups(g) if subgroups is None else subgroups
    out = {}
    for p in prime_factors(g.n):
        out[p] = max(h.order for h in subs if _is_p_power(h.order, p))
    return out


def _is_p_power(k, p):
    while k % p == 0:
        k //= p
    return k == 1


def largest_nilpotent_subgroup(g, subgroups=None):
    """Largest nilpotent subgroup; ties broken by member list."""
    subs = enumerate_subgroups(g) if subgroups is None else subgroups
    best = None
    for h in subs:
        if g.nilpotency_class(h) is None:
            continue
        if best is None or h.order > best.order:
            best = h
    return best


def abelian_subgroups_max_order(g, sub=None, subgroups=None):
    """Largest order of an abelian subgroup of ``sub`` (default: the whole group)."""
    subs = enumerate_subgroups(g) if subgroups is None else subgroups
    sub_mask = g.full_mask if sub is None else sub.mask
    return max(h.order for h in subs if h.mask & ~sub_mask == 0 and g.is_abelian_sub(h))


# -- automorphisms --


def brute_automorphism_count(g, cap=None):
    """Number of automorphisms, by backtracking on images of a small generating set.

    Images are restricted to elements of equal order; each partial assignment
    is checked for consistency on the subgroup its generators span.
    """
    cap = CAPS.automorphism if cap is None else cap
    if g.n > cap:
        raise CapExceededError("automorphism search of order", g.n, cap)
    if g.n == 1:
        return 1
    gens = g.small_generating_set(minimal=True)
    t = g.table
    orders = g.orders
    # BFS tree of each prefix subgroup: (element, parent, generator slot)
    trees = []
    for j in range(1, len(gens) + 1):
        sub = gens[:j]
        elems = [0]
        seen = {0}
        tree = [(0, -1, -1)]
        i = 0
        while i < len(elems):
            e = elems[i]
            for k, s in enumerate(sub):
                x = t[e][s]
                if x not in seen:
                    seen.add(x)
                    elems.append(x)
                    tree.append((x, e, k))
            i += 1
        trees.append((tree, elems))
    candidates = [[y for y in range(g.n) if orders[y] == orders[s]] for s in gens]
    images = []
    count = 0

    def consistent(j):
        tree, elems = trees[j]
        phi = {0: 0}
        for x, par, k in tree[1:]:
            phi[x] = t[phi[par]][images[k]]
        if len(set(phi.values())) != len(phi):
            return None
        for x in elems:
            px = phi[x]
            row = t[x]
            prow = t[px]
            for k in range(j + 1):
                if phi.get(row[gens[k]]) != prow[images[k]]:
                    return None
        return phi

    def search(j):
        nonlocal count
        if j == len(gens):
            count += 1
            return
        for y in candidates[j]:
            images.append(y)
            if consistent(j) is not None:
                search(j + 1)
            images.pop()

    search(0)
    return count


def element_order_profile(g):
    """Map order -> number of elements of that order."""
    prof = {}
    for o in g.orders:
        prof[o] = prof.get(o, 0) + 1
    return prof


def perm_order_profile(arrays):
    prof = {}
    for a in arrays:
        o = array_order(a)
        prof[o] = prof.get(o, 0) + 1
    return prof

