"""Permutation groups backed by a stabilizer chain (base and strong generating set).

The chain is built with the deterministic Schreier-Sims algorithm.  Every
Schreier generator is sifted exactly once per level (tested pairs are
remembered), so extending a finished chain by a few generators is cheap;
normal closures and subgroup joins rely on that.

Base points are chosen lazily: whenever a residue survives sifting through the
whole chain, the smallest point it moves becomes the next base point.
"""

from math import prod

from .config import CAPS, make_rng
from .errors import CapExceededError, DegreeMismatchError, MembershipError, NotNormalError
from .permutation import (
    Permutation,
    array_conj,
    identity_array,
    inv,
    mul,
)


class _Level:
    __slots__ = ("point", "gens", "points", "trans", "itrans", "checked", "ngens_done", "npts_done")

    def __init__(self, point, identity):
        self.point = point
        self.gens = []
        self.points = [point]
        self.trans = {point: identity}
        self.itrans = {point: identity}
        self.checked = set()
        self.ngens_done = 0
        self.npts_done = 0

    def copy(self):
        c = _Level.__new__(_Level)
        c.point = self.point
        c.gens = list(self.gens)
        c.points = list(self.points)
        c.trans = dict(self.trans)
        c.itrans = dict(self.itrans)
        c.checked = set(self.checked)
        c.ngens_done = self.ngens_done
        c.npts_done = self.npts_done
        return c

    def extend_orbit(self):
        gens, pts, trans, itrans = self.gens, self.points, self.trans, self.itrans
        for k in range(self.ngens_done, len(gens)):
            s = gens[k]
            i = 0
            while i < len(pts):
                d = pts[i]
                g = s[d]
                if g not in trans:
                    t = mul(trans[d], s)
                    trans[g] = t
                    itrans[g] = inv(t)
                    pts.append(g)
                i += 1
        self.ngens_done = len(gens)
        i = self.npts_done
        while i < len(pts):
            d = pts[i]
            for s in gens:
                g = s[d]
                if g not in trans:
                    t = mul(trans[d], s)
                    trans[g] = t
                    itrans[g] = inv(t)
                    pts.append(g)
            i += 1
        self.npts_done = len(pts)


class _Chain:
    """Mutable stabilizer chain; frozen once wrapped by :class:`GeneratedGroup`.

    ``limit`` restricts attention to points ``0..limit-1``: base points are
    taken there and an element fixing all of them counts as the identity.
    This is what lets a chain over paired permutations represent a quotient.
    """

    def __init__(self, degree, limit=None):
        self.degree = degree
        self.limit = degree if limit is None else limit
        self.identity = identity_array(degree)
        self._id_prefix = self.identity[: self.limit]
        self.levels = []

    def copy(self):
        c = _Chain.__new__(_Chain)
        c.degree = self.degree
        c.limit = self.limit
        c.identity = self.identity
        c._id_prefix = self._id_prefix
        c.levels = [lvl.copy() for lvl in self.levels]
        return c

    def is_id(self, a):
        if self.limit == self.degree:
            return a == self.identity
        return a[: self.limit] == self._id_prefix

    def sift(self, h, start=0):
        levels = self.levels
        for j in range(start, len(levels)):
            lvl = levels[j]
            u = lvl.itrans.get(h[lvl.point])
            if u is None:
                return h, j
            h = mul(h, u)
        return h, len(levels)

    def _first_moved(self, a):
        used = {lvl.point for lvl in self.levels}
        for i in range(self.limit):
            if a[i] != i and i not in used:
                return i
        raise AssertionError("residue fixes every point")

    def _add_strong(self, r, j):
        if j == len(self.levels):
            self.levels.append(_Level(self._first_moved(r), self.identity))
        for lvl in self.levels[: j + 1]:
            lvl.gens.append(r)

    def add_generators(self, gens):
        top = None
        for g in gens:
            r, j = self.sift(g)
            if self.is_id(r):
                continue
            self._add_strong(r, j)
            top = j if top is None else max(top, j)
        if top is not None:
            self._complete(len(self.levels) - 1)
        return top is not None

    def _complete(self, i):
        levels = self.levels
        while i >= 0:
            lvl = levels[i]
            lvl.extend_orbit()
            found = None
            trans, itrans, checked = lvl.trans, lvl.itrans, lvl.checked
            for d in lvl.points:
                u = trans[d]
                for k, s in enumerate(lvl.gens):
                    key = (d, k)
                    if key in checked:
                        continue
                    checked.add(key)
                    h = mul(mul(u, s), itrans[s[d]])
                    r, j = self.sift(h, i + 1)
                    if not self.is_id(r):
                        found = (r, j)
                        break
                if found:
                    break
            if found:
                r, j = found
                self._add_strong(r, j)
                i = j
            else:
                i -= 1

    def order(self):
        return prod(len(lvl.points) for lvl in self.levels)

    def strong_generators(self):
        if not self.levels:
            return []
        return list(self.levels[0].gens)


def _as_array(g, degree):
    a = g.array if isinstance(g, Permutation) else tuple(g)
    if len(a) != degree:
        raise DegreeMismatchError(f"degree mismatch: {len(a)} vs {degree}")
    return a


class GeneratedGroup:
    """A permutation group given by generators, with an exact stabilizer chain.

    Instances are immutable once constructed and safe to share.
    """

    def __init__(self, generators, degree=None, *, _chain=None):
        gens = list(generators)
        if degree is None:
            if not gens:
                raise ValueError("degree is required for an empty generator list")
            first = gens[0]
            degree = len(first.array if isinstance(first, Permutation) else first)
        arrays = [_as_array(g, degree) for g in gens]
        self.degree = degree
        self._gens = tuple(arrays)
        if _chain is None:
            _chain = _Chain(degree)
            _chain.add_generators(arrays)
        self._chain = _chain
        self.order = _chain.order()
        self._elements = None

    # -- construction helpers --

    @classmethod
    def trivial(cls, degree):
        return cls([], degree)

    def subgroup(self, generators):
        """The subgroup generated by ``generators`` (not checked for membership)."""
        return GeneratedGroup(generators, self.degree)

    def join(self, extra):
        """⟨self, extra⟩, reusing this group's chain."""
        arrays = [_as_array(g, self.degree) for g in extra]
        chain = self._chain.copy()
        chain.add_generators(arrays)
        return GeneratedGroup._from_chain(self._gens + tuple(arrays), self.degree, chain)

    @classmethod
    def _from_chain(cls, gen_arrays, degree, chain):
        g = cls.__new__(cls)
        g.degree = degree
        g._gens = tuple(gen_arrays)
        g._chain = chain
        g.order = chain.order()
        g._elements = None
        return g

    # -- accessors --

    @property
    def generators(self):
        return tuple(Permutation._raw(a) for a in self._gens)

    @property
    def generator_arrays(self):
        return self._gens

    @property
    def base(self):
        return tuple(lvl.point + 1 for lvl in self._chain.levels)

    @property
    def strong_generators(self):
        return tuple(Permutation._raw(a) for a in self._chain.strong_generators())

    @property
    def transversal_sizes(self):
        return tuple(len(lvl.points) for lvl in self._chain.levels)

    def identity(self):
        return Permutation.identity(self.degree)

    def is_trivial(self):
        return self.order == 1

    def contains_array(self, a):
        r, j = self._chain.sift(a)
        return j == len(self._chain.levels) and r == self._chain.identity

    def contains(self, g):
        a = g.array if isinstance(g, Permutation) else tuple(g)
        if len(a) != self.degree:
            return False
        return self.contains_array(a)

    __contains__ = contains

    def is_subgroup_of(self, other):
        return all(other.contains_array(a) for a in self._gens)

    def __eq__(self, other):
        if not isinstance(other, GeneratedGroup):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.order == other.order
            and self.is_subgroup_of(other)
        )

    def __hash__(self):
        return hash((self.degree, self.order))

    def is_abelian(self):
        g = self._gens
        return all(mul(a, b) == mul(b, a) for i, a in enumerate(g) for b in g[i + 1 :])

    def __repr__(self):
        return f"<GeneratedGroup degree={self.degree} order={self.order} ngens={len(self._gens)}>"

    # -- elements --

    def element_arrays(self, cap=None):
        """All elements as arrays, in chain order.  Cached."""
        cap = CAPS.element_scan if cap is None else cap
        if self.order > cap:
            raise CapExceededError("element enumeration of order", self.order, cap)
        if self._elements is None:
            elems = [self._chain.identity]
            for lvl in reversed(self._chain.levels):
                ts = [lvl.trans[p] for p in lvl.points]
                elems = [mul(e, t) for t in ts for e in elems]
            self._elements = elems
        return self._elements

    def elements(self, cap=None):
        return [Permutation._raw(a) for a in self.element_arrays(cap)]

    def random_array(self, rng):
        h = self._chain.identity
        for lvl in reversed(self._chain.levels):
            h = mul(h, lvl.trans[lvl.points[rng.randrange(len(lvl.points))]])
        return h

    def random_element(self, seed=None):
        """Uniformly random element: one random coset representative per level."""
        rng = make_rng(0 if seed is None else seed)
        return Permutation._raw(self.random_array(rng))

    def canonical_coset_rep(self, a):
        """Canonical representative of the right coset ``self * a``.

        Picks, level by level, the element of the coset whose image of the
        base point is smallest; the result is unique for the coset.
        """
        h = a
        for lvl in self._chain.levels:
            best = None
            best_d = None
            for d in lvl.points:
                v = h[d]
                if best is None or v < best:
                    best, best_d = v, d
            h = mul(lvl.trans[best_d], h)
        return h


def build_chain(generators, degree=None):
    """Build a :class:`GeneratedGroup` from a non-empty generator list (or explicit degree)."""
    gens = list(generators)
    if degree is None and not gens:
        raise ValueError("build_chain needs at least one generator or a degree")
    if degree is None:
        degree = gens[0].degree
    for g in gens:
        if g.degree != degree:
            raise DegreeMismatchError(f"generator of degree {g.degree}, expected {degree}")
    return GeneratedGroup(gens, degree)


def random_element(group, seed=None):
    return group.random_element(seed)


def is_normal_in(normal, group):
    """True if ``normal`` is a normal subgroup of ``group`` (generator conjugation check)."""
    if not normal.is_subgroup_of(group):
        return False
    for n in normal.generator_arrays:
        for s in group.generator_arrays:
            if not normal.contains_array(array_conj(n, s)):
                return False
    return True


class QuotientMap:
    """The action of ``group`` on the right cosets of a normal subgroup.

    ``image`` is the quotient as a permutation group of degree equal to the
    index; ``project`` maps elements of ``group`` to it and ``lift`` picks a
    preimage of a quotient element.
    """

    def __init__(self, group, normal, cap=None):
        cap = CAPS.coset_index if cap is None else cap
        if group.degree != normal.degree:
            raise DegreeMismatchError("group and normal subgroup differ in degree")
        if not normal.is_subgroup_of(group):
            raise MembershipError("normal subgroup is not contained in the group")
        if not is_normal_in(normal, group):
            raise NotNormalError("subgroup is not normal")
        index = group.order // normal.order
        if index > cap:
            raise CapExceededError("coset index", index, cap)
        self.group = group
        self.normal = normal
        self.index = index
        canon = normal.canonical_coset_rep
        reps = [canon(group._chain.identity)]
        lookup = {reps[0]: 0}
        gens = group.generator_arrays
        images = [[0] * index for _ in gens]
        i = 0
        while i < len(reps):
            r = reps[i]
            for k, s in enumerate(gens):
                c = canon(mul(r, s))
                j = lookup.get(c)
                if j is None:
                    j = len(reps)
                    reps.append(c)
                    lookup[c] = j
                images[k][i] = j
            i += 1
        if len(reps) != index:
            raise AssertionError(f"coset enumeration found {len(reps)} cosets, expected {index}")
        self.reps = reps
        self._lookup = lookup
        self.image = GeneratedGroup([tuple(im) for im in images], index)
        if self.image.order != index:
            raise AssertionError("quotient order does not match index")
        self._pair_chain = None

    def project_array(self, a):
        canon = self.normal.canonical_coset_rep
        look = self._lookup
        return tuple(look[canon(mul(r, a))] for r in self.reps)

    def project(self, g):
        return Permutation._raw(self.project_array(g.array))

    def _pairs(self):
        if self._pair_chain is None:
            off = self.index
            pairs = []
            for k, s in enumerate(self.group.generator_arrays):
                im = self.image.generator_arrays[k]
                pairs.append(im + tuple(x + off for x in s))
            chain = _Chain(self.index + self.group.degree, limit=self.index)
            chain.add_generators(pairs)
            self._pair_chain = chain
        return self._pair_chain

    def lift_array(self, x):
        chain = self._pairs()
        off = self.index
        h = tuple(x) + tuple(range(off, off + self.group.degree))
        r, j = chain.sift(h)
        if j != len(chain.levels) or not chain.is_id(r):
            raise MembershipError("element is not in the quotient")
        tail = r[off:]
        return inv(tuple(v - off for v in tail))

    def lift(self, x):
        return Permutation._raw(self.lift_array(x.array))


def coset_action(group, normal, cap=None):
    """Image of ``group`` acting on right cosets of ``normal``; order is the index."""
    return QuotientMap(group, normal, cap).image
