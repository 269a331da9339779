"""Structural subgroups of permutation groups: series, centre, radical, socle, Sylow, Fitting.

All functions take :class:`~nilpotwo.chain.GeneratedGroup` values and return
new ones.  Randomized searches take an explicit seed (int or ``random.Random``)
and are deterministic given it.
"""

import dataclasses
from math import factorial

from .chain import GeneratedGroup, QuotientMap, _Chain
from .config import CAPS, make_rng
from .errors import CapExceededError, MembershipError, SylowSearchError
from .permutation import (
    Permutation,
    array_comm,
    array_order,
    array_power,
    inv,
    is_identity_array,
    mul,
    p_part,
)
from .table_group import prime_factors


def _arr(x):
    return x.array if isinstance(x, Permutation) else tuple(x)


def is_prime_power(n, p=None):
    if n < 2:
        return n == 1
    ps = prime_factors(n)
    return len(ps) == 1 and (p is None or ps[0] == p)


def p_part_of(n, p):
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


class _Closure:
    """Incrementally grown subgroup: a chain plus the generators fed into it."""

    def __init__(self, degree):
        self.chain = _Chain(degree)
        self.gens = []

    def contains(self, a):
        r, j = self.chain.sift(a)
        return j == len(self.chain.levels) and r == self.chain.identity

    def add(self, a):
        if self.contains(a):
            return False
        self.chain.add_generators([a])
        self.gens.append(a)
        return True

    def order(self):
        return self.chain.order()

    def group(self):
        return GeneratedGroup._from_chain(self.gens, self.chain.degree, self.chain)


def _ncl_arrays(conj_by, arrays, degree):
    """Normal closure of ``arrays`` under conjugation by ``conj_by`` (no membership checks)."""
    cl = _Closure(degree)
    queue = [a for a in arrays if cl.add(a)]
    pairs = [(s, inv(s)) for s in conj_by]
    while queue:
        a = queue.pop()
        for s, si in pairs:
            c = mul(mul(si, a), s)
            if cl.add(c):
                queue.append(c)
    return cl.group()


def normal_closure(g, seeds):
    """Smallest normal subgroup of ``g`` containing ``seeds``."""
    arrays = [_arr(s) for s in seeds]
    for a in arrays:
        if len(a) != g.degree or not g.contains_array(a):
            raise MembershipError("normal closure seed is not an element of the group")
    return _ncl_arrays(g.generator_arrays, arrays, g.degree)


# -- series --


@dataclasses.dataclass
class SeriesRecord:
    terms: list
    kind: str
    factor_orders: list

    @property
    def orders(self):
        return [t.order for t in self.terms]

    @property
    def reaches_trivial(self):
        return self.terms[-1].order == 1

    @property
    def length(self):
        """Derived length / nilpotency class when the series reaches 1, else None."""
        return len(self.terms) - 1 if self.reaches_trivial else None


def _series(g, kind):
    terms = [g]
    while terms[-1].order > 1:
        h = terms[-1]
        if kind == "derived":
            gens = h.generator_arrays
            comms = [array_comm(a, b) for i, a in enumerate(gens) for b in gens[i + 1 :]]
            nxt = _ncl_arrays(gens, comms, g.degree)
        else:
            comms = [array_comm(a, s) for a in h.generator_arrays for s in g.generator_arrays]
            nxt = _ncl_arrays(g.generator_arrays, comms, g.degree)
        terms.append(nxt)
        if nxt.order == h.order:
            break
    factors = [terms[i].order // terms[i + 1].order for i in range(len(terms) - 1)]
    return SeriesRecord(terms, kind, factors)


def derived_series(g):
    return _series(g, "derived")


def lower_central_series(g):
    return _series(g, "lower-central")


def derived_subgroup(g):
    gens = g.generator_arrays
    comms = [array_comm(a, b) for i, a in enumerate(gens) for b in gens[i + 1 :]]
    return _ncl_arrays(gens, comms, g.degree)


def commutators_central(g):
    """True iff every commutator of generators commutes with every generator."""
    gens = g.generator_arrays
    for i, a in enumerate(gens):
        for b in gens[i + 1 :]:
            c = array_comm(a, b)
            if is_identity_array(c):
                continue
            for s in gens:
                if mul(c, s) != mul(s, c):
                    return False
    return True


def nilpotency_class(g):
    """Length of the lower central series, or None if ``g`` is not nilpotent."""
    if g.order == 1:
        return 0
    series = lower_central_series(g)
    cls = series.length
    if (cls is not None and cls <= 2) != commutators_central(g):
        raise AssertionError("class <= 2 disagrees with the commutator-centrality check")
    return cls


def is_nilpotent(g):
    return nilpotency_class(g) is not None


def is_solvable(g):
    if is_prime_power(g.order):
        return True
    return derived_series(g).reaches_trivial


# -- centralizers --


def centralizer(g, sub, cap=None):
    """Elements of ``g`` commuting with every generator of ``sub`` (element scan)."""
    if sub.degree != g.degree or not sub.is_subgroup_of(g):
        raise MembershipError("centralizer: subgroup not contained in the group")
    cap = CAPS.element_scan if cap is None else cap
    if g.order > cap:
        raise CapExceededError("centralizer scan of order", g.order, cap)
    sgens = [s for s in sub.generator_arrays if not is_identity_array(s)]
    cl = _Closure(g.degree)
    for x in g.element_arrays(cap):
        if cl.contains(x):
            continue
        if all(mul(x, s) == mul(s, x) for s in sgens):
            cl.add(x)
    return cl.group()


def center(g, cap=None):
    if g.is_abelian():
        return g
    return centralizer(g, g, cap)


# -- Sylow subgroups --


# above this order a failed trial join costs a full chain of a huge group
JOIN_TEST_MAX_ORDER = 10 ** 9


def sylow_subgroup(g, p, seed=0, budget=None):
    """A Sylow p-subgroup of ``g``.

    First tries the p-parts of the generators (exact for nilpotent groups);
    otherwise descends the stabilizer chain while the p-part of the order is
    preserved, then grows a p-subgroup with p-parts of random elements.
    """
    if g.order % p:
        raise ValueError(f"{p} does not divide the group order {g.order}")
    target = p_part_of(g.order, p)
    if g.order == target:
        return g
    parts = [p_part(a, p) for a in g.generator_arrays]
    quick = GeneratedGroup([a for a in parts if not is_identity_array(a)], g.degree)
    if quick.order == target:
        return quick
    budget = CAPS.sylow_budget if budget is None else budget
    rng = make_rng(seed, "sylow", p)
    host = _sylow_host(g, p, target)
    cl = _Closure(g.degree)
    for _ in range(3):
        misses = 0
        while cl.order() < target and misses < budget:
            y = host.random_array(rng)
            w = p_part(y, p)
            if is_identity_array(w) or cl.contains(w):
                misses += 1
                continue
            if _normalizes(w, cl):
                cl.add(w)
                misses = 0
                continue
            if g.order > JOIN_TEST_MAX_ORDER:
                misses += 1
                continue
            trial = _Closure(g.degree)
            trial.chain = cl.chain.copy()
            trial.gens = list(cl.gens)
            trial.add(w)
            o = trial.order()
            if target % o == 0:
                cl = trial
                misses = 0
            else:
                misses += 1
        if cl.order() == target:
            return cl.group()
        cl = _Closure(g.degree)
    raise SylowSearchError(f"Sylow {p}-subgroup search exhausted its budget (order {g.order})")


def _normalizes(w, cl):
    wi = inv(w)
    return all(cl.contains(mul(mul(wi, a), w)) for a in cl.gens)


def _sylow_host(g, p, target):
    """Deepest stabilizer-chain subgroup whose order keeps the full p-part."""
    levels = g._chain.levels
    k = 0
    while k < len(levels) and len(levels[k].points) % p:
        k += 1
    if k == 0:
        return g
    gens = [s for s in g._chain.strong_generators() if all(s[levels[i].point] == levels[i].point for i in range(k))]
    host = GeneratedGroup(gens, g.degree)
    if host.order % target:
        raise AssertionError("stabilizer descent lost part of the Sylow order")
    return host


# -- radicals --


def p_core(g, p, seed=0, cap=None):
    """O_p(g): the largest normal p-subgroup, scanned inside a Sylow p-subgroup."""
    if g.order % p:
        return GeneratedGroup.trivial(g.degree)
    cap = CAPS.fitting_scan if cap is None else cap
    P = sylow_subgroup(g, p, seed)
    if is_normal(P, g):
        return P
    if P.order > cap:
        raise CapExceededError("p-core scan of Sylow order", P.order, cap)
    rng = make_rng(seed, "pcore", p)
    probes = [g.random_array(rng) for _ in range(4)]
    probes = [(r, inv(r)) for r in probes]
    core = _Closure(g.degree)
    for x in P.element_arrays(cap):
        if core.contains(x):
            continue
        if not all(P.contains_array(mul(mul(ri, x), r)) for r, ri in probes):
            continue
        trial = _ncl_arrays(g.generator_arrays, core.gens + [x], g.degree)
        if is_prime_power(trial.order, p):
            core = _Closure(g.degree)
            for a in trial.generator_arrays:
                core.add(a)
            if core.order() == P.order:
                break
    return core.group()


def is_normal(sub, g):
    for n in sub.generator_arrays:
        for s in g.generator_arrays:
            if not sub.contains_array(mul(mul(inv(s), n), s)):
                return False
    return True


def fitting_subgroup(g, seed=0, cap=None):
    """Largest nilpotent normal subgroup: the join of the p-cores."""
    if g.order == 1 or is_nilpotent(g):
        return g
    cl = _Closure(g.degree)
    for p in prime_factors(g.order):
        for a in p_core(g, p, seed, cap).generator_arrays:
            cl.add(a)
    return cl.group()


def _solvable_normal_piece(q, seed):
    """Generators of a nontrivial solvable normal subgroup of ``q``, or None.

    A nontrivial solvable normal subgroup contains an abelian minimal normal
    p-subgroup N, and N meets the centre of every Sylow p-subgroup; so it is
    enough to try the order-p elements of each Sylow centre.
    """
    for p in prime_factors(q.order):
        P = sylow_subgroup(q, p, seed)
        Z = center(P)
        for z in sorted(Z.element_arrays()):
            if array_order(z) != p:
                continue
            n = _ncl_arrays(q.generator_arrays, [z], q.degree)
            if is_solvable(n):
                return list(n.generator_arrays)
    return None


def solvable_radical(g, seed=0):
    """Largest solvable normal subgroup, by iterated pull-back of solvable normal pieces."""
    if is_solvable(g):
        return g
    radical = GeneratedGroup.trivial(g.degree)
    qmap = None
    q = g
    while True:
        piece = _solvable_normal_piece(q, seed)
        if piece is None:
            return radical
        lifts = [qmap.lift_array(x) for x in piece] if qmap else piece
        radical = _ncl_arrays(g.generator_arrays, list(radical.generator_arrays) + lifts, g.degree)
        qmap = QuotientMap(g, radical)
        q = qmap.image


# -- conjugacy classes and minimal normal subgroups --


def class_representatives(g, cap=None):
    """One (lexicographically least) element per conjugacy class, by orbit partition."""
    cap = CAPS.class_scan if cap is None else cap
    if g.order > cap:
        raise CapExceededError("class scan of order", g.order, cap)
    elems = sorted(g.element_arrays())
    seen = set()
    reps = []
    pairs = [(s, inv(s)) for s in g.generator_arrays]
    for x in elems:
        if x in seen:
            continue
        reps.append(x)
        seen.add(x)
        stack = [x]
        while stack:
            y = stack.pop()
            for s, si in pairs:
                c = mul(mul(si, y), s)
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
    return reps


def _minimal_members(groups):
    groups = sorted(groups, key=lambda h: (h.order, sorted(h.generator_arrays)))
    out = []
    for h in groups:
        if any(m.order < h.order and m.is_subgroup_of(h) for m in out):
            continue
        if any(m.order == h.order and m.is_subgroup_of(h) for m in out):
            continue
        out.append(h)
    return out


def minimal_normals_with_status(g, seed=0, samples=40):
    """(minimal normal subgroups, complete) where ``complete`` is False when sampled."""
    if g.order == 1:
        return [], True
    if g.order <= CAPS.class_scan:
        cands = [_ncl_arrays(g.generator_arrays, [x], g.degree) for x in class_representatives(g)[1:]]
        return _minimal_members(cands), True
    rng = make_rng(seed, "socle")
    cands = []
    for _ in range(samples):
        x = g.random_array(rng)
        if is_identity_array(x):
            continue
        # powers of prime order shrink the closure towards a minimal one
        o = array_order(x)
        x = array_power(x, o // prime_factors(o)[0])
        n = _ncl_arrays(g.generator_arrays, [x], g.degree)
        for _ in range(4):
            y = n.random_array(rng)
            if is_identity_array(y):
                continue
            m = _ncl_arrays(g.generator_arrays, [y], g.degree)
            if m.order < n.order:
                n = m
        cands.append(n)
    return _minimal_members(cands), False


def socle_minimal_normals(g, seed=0):
    return minimal_normals_with_status(g, seed)[0]


# -- abelian subgroups and recognition --


def maximal_abelian_subgroup(g, seed=0, cap=None):
    """A maximal (by inclusion) abelian subgroup containing the centre, found greedily."""
    if g.is_abelian():
        return g
    z = center(g, cap)
    rng = make_rng(seed, "maxab")
    elems = list(g.element_arrays(cap))
    rng.shuffle(elems)
    cl = _Closure(g.degree)
    for a in z.generator_arrays:
        cl.add(a)
    for x in elems:
        if cl.contains(x):
            continue
        if all(mul(x, a) == mul(a, x) for a in cl.gens):
            cl.add(x)
    a = cl.group()
    if commutators_central(g) and a.order ** 2 < g.order:
        raise AssertionError("maximal abelian subgroup A of a class-2 group with |A|^2 < |G|")
    return a


ALT_ORDERS = {factorial(a) // 2: a for a in range(5, 21)}


def is_simple_nonabelian(g, seed=0):
    """(answer, exact): exact when the minimal normal scan was exhaustive."""
    if g.order == 1 or g.is_abelian() or is_prime_power(g.order):
        return False, True
    mins, complete = minimal_normals_with_status(g, seed)
    return (len(mins) == 1 and mins[0].order == g.order), complete


def _has_element_of_order(g, k):
    return any(array_order(x) % k == 0 for x in g.element_arrays())


def recognize_alternating(g, seed=0):
    """Degree a if ``g`` is simple of order a!/2 with 5 <= a <= 20, else None.

    The only clash in that range is order 20160 = |Alt(8)| = |PSL(3,4)|, split
    by the presence of elements of order 6 (Alt(8) has (1,2)(3,4,5), PSL(3,4)
    has none).
    """
    a = ALT_ORDERS.get(g.order)
    if a is None:
        return None
    simple, _ = is_simple_nonabelian(g, seed)
    if not simple:
        return None
    if a == 8 and not _has_element_of_order(g, 6):
        return None
    return a


def derived_length_floor_ok(order, p, d):
    """Safe bound for p-groups: derived length d forces order >= p**(2**(d-1))."""
    return d == 0 or order >= p ** (2 ** (d - 1))
