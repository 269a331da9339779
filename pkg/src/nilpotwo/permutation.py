"""Permutations of {1..n}.

Points are 1-based at every public boundary (cycle strings, ``images``,
``__call__``) and 0-based in the internal array form ``array``.

Composition is left-to-right: ``a * b`` first applies ``a`` then ``b``, so
``(a * b)(i) == b(a(i))``.  Conjugation is ``x ** g == ~g * x * g`` and the
commutator is ``[a, b] = a^-1 b^-1 a b``.
"""

from math import gcd

from .errors import (
    DegreeMismatchError,
    MalformedCycleError,
    PointOutOfRangeError,
    RepeatedPointError,
)

# -- raw array helpers (0-based tuples), used by the hot loops elsewhere --


def mul(a, b):
    """Array form of ``a * b`` (apply ``a`` first)."""
    return tuple(map(b.__getitem__, a))


def inv(a):
    r = [0] * len(a)
    for i, x in enumerate(a):
        r[x] = i
    return tuple(r)


def identity_array(n):
    return tuple(range(n))


def is_identity_array(a):
    return all(i == x for i, x in enumerate(a))


def array_cycles(a):
    seen = [False] * len(a)
    out = []
    for i in range(len(a)):
        if seen[i] or a[i] == i:
            seen[i] = True
            continue
        cyc = [i]
        seen[i] = True
        j = a[i]
        while j != i:
            seen[j] = True
            cyc.append(j)
            j = a[j]
        out.append(cyc)
    return out


def array_order(a):
    o = 1
    for c in array_cycles(a):
        o = o * len(c) // gcd(o, len(c))
    return o


def array_power(a, k):
    """``a ** k`` for integer ``k`` (negative allowed), computed cycle by cycle."""
    r = list(range(len(a)))
    for c in array_cycles(a):
        m = len(c)
        s = k % m
        for idx, x in enumerate(c):
            r[x] = c[(idx + s) % m]
    return tuple(r)


def array_conj(x, g, g_inv=None):
    """``g^-1 x g``."""
    if g_inv is None:
        g_inv = inv(g)
    return mul(mul(g_inv, x), g)


def array_comm(a, b):
    ai, bi = inv(a), inv(b)
    return mul(mul(ai, bi), mul(a, b))


def p_part(a, p):
    """The p-part of ``a``: a power of ``a`` of p-power order with the same p-component."""
    o = array_order(a)
    m = o
    while m % p == 0:
        m //= p
    return array_power(a, m)


class Permutation:
    """An immutable permutation of {1..degree}."""

    __slots__ = ("array",)

    def __init__(self, array):
        array = tuple(array)
        if sorted(array) != list(range(len(array))):
            raise ValueError(f"not a permutation: {array}")
        self.array = array

    @classmethod
    def _raw(cls, array):
        p = cls.__new__(cls)
        p.array = array
        return p

    @classmethod
    def identity(cls, degree):
        return cls._raw(tuple(range(degree)))

    @classmethod
    def from_images(cls, images):
        """Build from 1-based images: ``images[i-1]`` is the image of point ``i``."""
        return cls(x - 1 for x in images)

    @classmethod
    def from_cycles(cls, cycles, degree):
        a = list(range(degree))
        for c in cycles:
            for i, x in enumerate(c):
                a[x - 1] = c[(i + 1) % len(c)] - 1
        return cls(a)

    @property
    def degree(self):
        return len(self.array)

    @property
    def images(self):
        return tuple(x + 1 for x in self.array)

    def __call__(self, point):
        return self.array[point - 1] + 1

    def _check(self, other):
        if len(self.array) != len(other.array):
            raise DegreeMismatchError(
                f"degree mismatch: {len(self.array)} vs {len(other.array)}"
            )

    def __mul__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        self._check(other)
        return Permutation._raw(mul(self.array, other.array))

    def __invert__(self):
        return Permutation._raw(inv(self.array))

    def inverse(self):
        return ~self

    def __pow__(self, other):
        if isinstance(other, Permutation):
            self._check(other)
            return Permutation._raw(array_conj(self.array, other.array))
        return Permutation._raw(array_power(self.array, int(other)))

    def commutator(self, other):
        self._check(other)
        return Permutation._raw(array_comm(self.array, other.array))

    def order(self):
        return array_order(self.array)

    def is_identity(self):
        return is_identity_array(self.array)

    def cycles(self):
        """Non-trivial cycles as tuples of 1-based points."""
        return [tuple(x + 1 for x in c) for c in array_cycles(self.array)]

    def support(self):
        return [i + 1 for i, x in enumerate(self.array) if i != x]

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.array == other.array

    def __lt__(self, other):
        return self.array < other.array

    def __hash__(self):
        return hash(self.array)

    def __str__(self):
        cs = self.cycles()
        if not cs:
            return "()"
        return "".join("(" + ",".join(map(str, c)) + ")" for c in cs)

    def __repr__(self):
        return f"Permutation({self}, degree={self.degree})"


def compose(a, b):
    """``a`` then ``b``; raises :class:`DegreeMismatchError` on unequal degrees."""
    return a * b


def _parse_generator(text, start, degree, line):
    """Parse one generator starting at ``text[start] == '('``.  Returns (perm, end)."""
    pos = start
    n = len(text)
    cycles = []
    used = set()
    while pos < n and text[pos] == "(":
        open_col = pos
        pos += 1
        while pos < n and text[pos] in " \t":
            pos += 1
        if pos < n and text[pos] == ")":
            pos += 1
            cycles.append(())
            continue
        points = []
        while True:
            while pos < n and text[pos] in " \t":
                pos += 1
            num_start = pos
            while pos < n and text[pos].isdigit():
                pos += 1
            if num_start == pos:
                raise MalformedCycleError(
                    f"expected a point at {text[num_start:num_start + 8]!r}",
                    line, num_start + 1,
                )
            p = int(text[num_start:pos])
            if p < 1 or p > degree:
                raise PointOutOfRangeError(
                    f"point {p} outside 1..{degree}", line, num_start + 1
                )
            if p in used:
                raise RepeatedPointError(f"point {p} repeated", line, num_start + 1)
            used.add(p)
            points.append(p)
            while pos < n and text[pos] in " \t":
                pos += 1
            if pos < n and text[pos] == ",":
                pos += 1
                continue
            if pos < n and text[pos] == ")":
                pos += 1
                break
            raise MalformedCycleError("unterminated cycle", line, open_col + 1)
        cycles.append(tuple(points))
    return Permutation.from_cycles([c for c in cycles if c], degree), pos


def parse_generators(text, degree, line=None):
    """Parse a whitespace-separated list of generators in disjoint-cycle notation."""
    gens = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch != "(":
            raise MalformedCycleError(f"unexpected character {ch!r}", line, pos + 1)
        g, pos = _parse_generator(text, pos, degree, line)
        gens.append(g)
    return gens


def parse_permutation(text, degree):
    """Parse a single generator such as ``"(1,2)(3,4)"`` or ``"()"``."""
    if degree < 1:
        raise ValueError("degree must be positive")
    gens = parse_generators(text.strip(), degree)
    if len(gens) != 1:
        raise MalformedCycleError(f"expected exactly one permutation, got {len(gens)}")
    return gens[0]
