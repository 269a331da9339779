"""Deterministic constructors for the group families used throughout, plus the built-in corpus.

Family specs use the text form ``name(p1, p2, ...)`` with nesting, e.g.
``wreath(symmetric(4), 4)`` or ``direct_product(alternating(5), alternating(5))``.
The long form ``family(name, p1, ...)`` is accepted too.

Parameter conventions: ``dihedral(n)`` and ``dicyclic(n)`` take the group
order; ``extraspecial(p, e)`` builds the group of order ``p**e`` (plus type for
p = 2, exponent p for odd p); ``elementary_abelian(p, r)`` has order ``p**r``.
"""

import dataclasses
import re
from math import factorial

from .chain import GeneratedGroup
from .errors import CapExceededError, ParseError
from .permutation import Permutation

CORPUS_VERSION = 1
MAX_DEGREE = 4096

_ALIASES = {
    "elementary-abelian": "elementary_abelian",
    "elementary_abelian": "elementary_abelian",
    "direct-product": "direct_product",
    "product": "direct_product",
    "direct_product": "direct_product",
    "dixon-tower": "dixon_tower",
    "dixon": "dixon_tower",
    "dixon_tower": "dixon_tower",
    "elem3": "elem3_in_alt",
    "elem3_in_alt": "elem3_in_alt",
}
FAMILIES = (
    "cyclic", "dihedral", "dicyclic", "symmetric", "alternating", "elementary_abelian",
    "extraspecial", "direct_product", "wreath", "dixon_tower", "sl2", "psl3", "elem3_in_alt",
)


@dataclasses.dataclass(frozen=True)
class FamilySpec:
    tag: str
    params: tuple

    def __str__(self):
        return f"{self.tag}({', '.join(str(p) for p in self.params)})"


def _cycle(points, degree):
    return Permutation.from_cycles([points], degree) if len(points) > 1 else Permutation.identity(degree)


def cyclic(n):
    if n < 1:
        raise ValueError("cyclic order must be positive")
    if n == 1:
        return GeneratedGroup([], 1)
    return GeneratedGroup([_cycle(list(range(1, n + 1)), n)], n)


def dihedral(order):
    if order < 2 or order % 2:
        raise ValueError("dihedral order must be even and at least 2")
    m = order // 2
    if m == 1:
        return cyclic(2)
    if m == 2:
        return GeneratedGroup([Permutation.from_cycles([(1, 2)], 4), Permutation.from_cycles([(3, 4)], 4)], 4)
    rot = _cycle(list(range(1, m + 1)), m)
    refl = Permutation.from_images([1] + list(range(m, 1, -1)))
    return GeneratedGroup([rot, refl], m)


def regular_representation(elements, op, gens):
    """Right regular representation of a group given by an element list and product function."""
    index = {e: i for i, e in enumerate(elements)}
    perms = []
    for g in gens:
        perms.append(tuple(index[op(e, g)] for e in elements))
    return GeneratedGroup(perms, len(elements))


def dicyclic(order):
    if order < 8 or order % 4:
        raise ValueError("dicyclic order must be a multiple of 4, at least 8")
    m = order // 4
    n2 = 2 * m

    def op(u, v):
        (k, j), (l, i) = u, v
        if j == 0:
            return ((k + l) % n2, i)
        if i == 0:
            return ((k - l) % n2, 1)
        return ((k - l + m) % n2, 0)

    elems = [(k, j) for j in (0, 1) for k in range(n2)]
    return regular_representation(elems, op, [(1, 0), (0, 1)])


def symmetric(n):
    if n < 1:
        raise ValueError("degree must be positive")
    if n == 1:
        return GeneratedGroup([], 1)
    if n == 2:
        return GeneratedGroup([_cycle([1, 2], 2)], 2)
    return GeneratedGroup([_cycle([1, 2], n), _cycle(list(range(1, n + 1)), n)], n)


def alternating(n):
    """Alt(n) on {(1,2,3), (1,...,n)} for odd n and {(1,2,3), (2,...,n)} for even n."""
    if n < 1:
        raise ValueError("degree must be positive")
    if n < 3:
        return GeneratedGroup([], n)
    if n == 3:
        return GeneratedGroup([_cycle([1, 2, 3], 3)], 3)
    long = list(range(1, n + 1)) if n % 2 else list(range(2, n + 1))
    return GeneratedGroup([_cycle([1, 2, 3], n), _cycle(long, n)], n)


def elementary_abelian(p, r):
    if p < 2 or r < 1:
        raise ValueError("need a prime p and rank r >= 1")
    d = p * r
    gens = [_cycle(list(range(i * p + 1, i * p + p + 1)), d) for i in range(r)]
    return GeneratedGroup(gens, d)


def extraspecial(p, e):
    """Extraspecial group of order p**e in its regular representation."""
    if e < 3 or e % 2 == 0:
        raise ValueError("extraspecial exponent must be odd and at least 3")
    n = (e - 1) // 2
    if p == 2:
        # (v, z) with v in F_2^(2n) as a bitmask; z accumulates sum v_2i * w_(2i+1)
        def beta(v, w):
            s = 0
            for i in range(n):
                s ^= (v >> (2 * i) & 1) & (w >> (2 * i + 1) & 1)
            return s

        def op(x, y):
            return (x[0] ^ y[0], x[1] ^ y[1] ^ beta(x[0], y[0]))

        elems = [(v, z) for v in range(1 << (2 * n)) for z in (0, 1)]
        gens = [(1 << j, 0) for j in range(2 * n)]
        return regular_representation(elems, op, gens)

    def op(x, y):
        a, b, c = x
        a2, b2, c2 = y
        dot = sum(ai * bi for ai, bi in zip(a, b2))
        return (
            tuple((u + v) % p for u, v in zip(a, a2)),
            tuple((u + v) % p for u, v in zip(b, b2)),
            (c + c2 + dot) % p,
        )

    import itertools

    vecs = list(itertools.product(range(p), repeat=n))
    elems = [(a, b, c) for a in vecs for b in vecs for c in range(p)]
    zero = (0,) * n
    gens = []
    for j in range(n):
        unit = tuple(1 if i == j else 0 for i in range(n))
        gens.append((unit, zero, 0))
        gens.append((zero, unit, 0))
    return regular_representation(elems, op, gens)


def direct_product(a, b):
    da, db = a.degree, b.degree
    gens = [tuple(g) + tuple(range(da, da + db)) for g in a.generator_arrays]
    gens += [tuple(range(da)) + tuple(x + da for x in g) for g in b.generator_arrays]
    return GeneratedGroup(gens, da + db)


def wreath_product(base, k, max_degree=MAX_DEGREE):
    """Imprimitive wreath product base ≀ Sym(k) on ``k`` blocks of size ``deg(base)``.

    Base generators act on the first block only; with the transitive top group
    they generate all k copies.
    """
    if k < 1:
        raise ValueError("top degree must be at least 1")
    d = base.degree
    n = d * k
    if n > max_degree:
        raise CapExceededError("wreath product degree", n, max_degree)
    gens = [tuple(g) + tuple(range(d, n)) for g in base.generator_arrays]

    def blocks(top):
        return tuple(top[i // d] * d + i % d for i in range(n))

    if k >= 2:
        gens.append(blocks([1, 0] + list(range(2, k))))
    if k >= 3:
        gens.append(blocks([(i + 1) % k for i in range(k)]))
    return GeneratedGroup(gens, n)


def dixon_tower_order(levels):
    n = 4 ** levels
    return 24 ** ((n - 1) // 3)


def dixon_tower(levels, max_levels=3):
    """Sym(4) ≀ Sym(4) ≀ ... (``levels`` factors) on 4**levels points.

    This is the extremal family for solvable permutation groups: its order is
    exactly 24**((n-1)/3).
    """
    if levels < 1:
        raise ValueError("dixon tower needs at least one level")
    if levels > max_levels:
        raise CapExceededError("dixon tower levels", levels, max_levels)
    g = symmetric(4)
    for _ in range(levels - 1):
        g = wreath_product(g, 4)
    if g.order != dixon_tower_order(levels):
        raise AssertionError("dixon tower order differs from 24^((n-1)/3)")
    return g


def elem3_in_alt(a):
    """⟨(1,2,3), (4,5,6), ...⟩ inside Alt(a): elementary abelian of order 3**(a//3)."""
    if a < 3:
        raise ValueError("need a >= 3")
    k = a // 3
    gens = [_cycle([3 * i + 1, 3 * i + 2, 3 * i + 3], a) for i in range(k)]
    g = GeneratedGroup(gens, a)
    if g.order != 3 ** k or not g.is_abelian():
        raise AssertionError("elem3_in_alt: wrong order or not abelian")
    return g


# -- small linear groups, used as foils and for SL(2,3) --


def _field(q):
    if q in (2, 3, 5, 7, 11, 13):
        return (lambda x, y: (x + y) % q), (lambda x, y: (x * y) % q), list(range(q))
    if q == 4:
        # GF(4) = F_2[w]/(w^2+w+1); 2 = w, 3 = w+1
        mt = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]]
        return (lambda x, y: x ^ y), (lambda x, y: mt[x][y]), [0, 1, 2, 3]
    raise ValueError(f"unsupported field size {q}")


def sl2(p):
    """SL(2, p) acting on the nonzero vectors of F_p^2 (degree p^2 - 1)."""
    add, mul_, elems = _field(p)
    vecs = [(a, b) for a in elems for b in elems if (a, b) != (0, 0)]
    index = {v: i for i, v in enumerate(vecs)}
    mats = [((1, 1), (0, 1)), ((1, 0), (1, 1))]
    gens = []
    for m in mats:
        img = []
        for v in vecs:
            w = (add(mul_(v[0], m[0][0]), mul_(v[1], m[1][0])), add(mul_(v[0], m[0][1]), mul_(v[1], m[1][1])))
            img.append(index[w])
        gens.append(tuple(img))
    return GeneratedGroup(gens, len(vecs))


def psl3(q):
    """PSL(3, q) acting on the q^2+q+1 points of the projective plane (q in 2, 3, 4, 5)."""
    add, mul_, elems = _field(q)
    inv_ = {x: y for x in elems for y in elems if mul_(x, y) == 1}
    pts = []
    for v in ((a, b, c) for a in elems for b in elems for c in elems):
        if v == (0, 0, 0):
            continue
        lead = next(x for x in v if x)
        if lead == 1:
            pts.append(v)
    index = {v: i for i, v in enumerate(pts)}

    def normalize(v):
        lead = next(x for x in v if x)
        s = inv_[lead]
        return tuple(mul_(x, s) for x in v)

    scalars = [1] if q != 4 else [1, 2]
    gens = []
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            for lam in scalars:
                img = []
                for v in pts:
                    w = list(v)
                    w[j] = add(w[j], mul_(lam, v[i]))
                    img.append(index[normalize(tuple(w))])
                gens.append(tuple(img))
    return GeneratedGroup(gens, len(pts))


# -- spec parsing and dispatch --

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_\-]*)|(\()|(\))|(,))")


def parse_family(text):
    """Parse ``name(args...)`` into a :class:`FamilySpec` (args are ints or nested specs)."""
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", 1, pos + 1)
        kind = m.lastindex
        toks.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    i = 0

    def expect(kind, what):
        nonlocal i
        if i >= len(toks) or toks[i][0] != kind:
            col = toks[i][2] if i < len(toks) else len(text) + 1
            raise ParseError(f"expected {what}", 1, col)
        i += 1
        return toks[i - 1]

    def spec():
        nonlocal i
        _, name, col = expect(2, "a family name")
        name = name.lower()
        expect(3, "'('")
        args = []
        if i < len(toks) and toks[i][0] == 4:
            i += 1
        else:
            while True:
                if i < len(toks) and toks[i][0] == 1:
                    args.append(int(toks[i][1]))
                    i += 1
                elif i < len(toks) and toks[i][0] == 2 and i + 1 < len(toks) and toks[i + 1][0] == 3:
                    args.append(spec())
                elif i < len(toks) and toks[i][0] == 2 and name == "family" and not args:
                    args.append(toks[i][1].lower())
                    i += 1
                else:
                    col = toks[i][2] if i < len(toks) else len(text) + 1
                    raise ParseError("expected an integer or a nested family", 1, col)
                if i < len(toks) and toks[i][0] == 5:
                    i += 1
                    continue
                expect(4, "')'")
                break
        if name == "family":
            if not args or not isinstance(args[0], str):
                raise ParseError("family(...) needs a family name first", 1, col)
            name, args = args[0], args[1:]
        name = _ALIASES.get(name, name)
        if name not in FAMILIES:
            raise ParseError(f"unknown family {name!r}", 1, col)
        return FamilySpec(name, tuple(args))

    result = spec()
    if i != len(toks):
        raise ParseError("trailing input after family spec", 1, toks[i][2])
    return result


def _ints(spec, count):
    ps = spec.params
    if len(ps) != count or not all(isinstance(p, int) for p in ps):
        raise ValueError(f"{spec.tag} takes {count} integer parameter(s), got {ps}")
    return ps


def build(spec):
    """Construct the group described by a :class:`FamilySpec` (or its text form)."""
    if isinstance(spec, str):
        spec = parse_family(spec)
    tag = spec.tag
    if tag == "cyclic":
        return cyclic(*_ints(spec, 1))
    if tag == "dihedral":
        return dihedral(*_ints(spec, 1))
    if tag == "dicyclic":
        return dicyclic(*_ints(spec, 1))
    if tag == "symmetric":
        return symmetric(*_ints(spec, 1))
    if tag == "alternating":
        return alternating(*_ints(spec, 1))
    if tag == "elementary_abelian":
        return elementary_abelian(*_ints(spec, 2))
    if tag == "extraspecial":
        return extraspecial(*_ints(spec, 2))
    if tag == "dixon_tower":
        return dixon_tower(*_ints(spec, 1))
    if tag == "elem3_in_alt":
        return elem3_in_alt(*_ints(spec, 1))
    if tag == "sl2":
        return sl2(*_ints(spec, 1))
    if tag == "psl3":
        return psl3(*_ints(spec, 1))
    if tag == "direct_product":
        if len(spec.params) < 2 or not all(isinstance(p, FamilySpec) for p in spec.params):
            raise ValueError("direct_product takes at least two nested families")
        g = build(spec.params[0])
        for p in spec.params[1:]:
            g = direct_product(g, build(p))
        return g
    if tag == "wreath":
        ps = spec.params
        if len(ps) != 2 or not isinstance(ps[0], FamilySpec) or not isinstance(ps[1], int):
            raise ValueError("wreath takes a nested family and a top degree")
        return wreath_product(build(ps[0]), ps[1])
    raise ValueError(f"unknown family {tag!r}")


def expected_order(spec):
    """Closed-form order of a family spec, independent of the chain."""
    if isinstance(spec, str):
        spec = parse_family(spec)
    t, ps = spec.tag, spec.params
    if t == "cyclic":
        return ps[0]
    if t in ("dihedral", "dicyclic"):
        return ps[0]
    if t == "symmetric":
        return factorial(ps[0])
    if t == "alternating":
        return max(1, factorial(ps[0]) // 2)
    if t in ("elementary_abelian", "extraspecial"):
        return ps[0] ** ps[1]
    if t == "dixon_tower":
        return dixon_tower_order(ps[0])
    if t == "elem3_in_alt":
        return 3 ** (ps[0] // 3)
    if t == "sl2":
        p = ps[0]
        return p * (p * p - 1)
    if t == "psl3":
        q = ps[0]
        from math import gcd

        return q ** 3 * (q ** 2 - 1) * (q ** 3 - 1) // gcd(3, q - 1)
    if t == "direct_product":
        out = 1
        for p in ps:
            out *= expected_order(p)
        return out
    if t == "wreath":
        return expected_order(ps[0]) ** ps[1] * factorial(ps[1])
    raise ValueError(t)


def _corpus_specs():
    out = []
    for n in range(1, 65):
        out.append((f"C{n}", f"cyclic({n})"))
    for n in range(4, 65, 2):
        out.append((f"D{n}", f"dihedral({n})"))
    for n in range(8, 65, 4):
        out.append((f"Dic{n}", f"dicyclic({n})"))
    for p in (2, 3, 5):
        for r in (2, 3, 4):
            out.append((f"E{p}^{r}", f"elementary_abelian({p}, {r})"))
    out += [
        ("extraspecial_3_3", "extraspecial(3, 3)"),
        ("extraspecial_2_5", "extraspecial(2, 5)"),
        ("extraspecial_2_7", "extraspecial(2, 7)"),
    ]
    for n in range(2, 9):
        out.append((f"Sym({n})", f"symmetric({n})"))
    for n in range(3, 9):
        out.append((f"Alt({n})", f"alternating({n})"))
    out += [
        ("SL(2,3)", "sl2(3)"),
        ("Sym(3)xC2", "direct_product(symmetric(3), cyclic(2))"),
        ("Sym(3)xD8", "direct_product(symmetric(3), dihedral(8))"),
        ("Sym(3)xSym(3)", "direct_product(symmetric(3), symmetric(3))"),
        ("D8xC2", "direct_product(dihedral(8), cyclic(2))"),
        ("Q8xC2", "direct_product(dicyclic(8), cyclic(2))"),
        ("D8xD8", "direct_product(dihedral(8), dihedral(8))"),
        ("Alt(4)xC3", "direct_product(alternating(4), cyclic(3))"),
        ("Alt(5)^2", "direct_product(alternating(5), alternating(5))"),
        ("Sym(4)xAlt(5)", "direct_product(symmetric(4), alternating(5))"),
        ("C2wrS2", "wreath(cyclic(2), 2)"),
        ("C3wrS2", "wreath(cyclic(3), 2)"),
        ("C2wrS3", "wreath(cyclic(2), 3)"),
        ("Sym(3)wrS2", "wreath(symmetric(3), 2)"),
        ("C2wrS4", "wreath(cyclic(2), 4)"),
        ("Sym(4)wrS2", "wreath(symmetric(4), 2)"),
        ("dixon_tower_1", "dixon_tower(1)"),
        ("dixon_tower_2", "dixon_tower(2)"),
        ("PSL(3,2)", "psl3(2)"),
        ("PSL(3,4)", "psl3(4)"),
    ]
    return out


EXTENDED_SPECS = [
    ("dixon_tower_3", "dixon_tower(3)"),
    ("Alt(9)", "alternating(9)"),
]


def corpus_specs(extended=False):
    """(name, family-spec text) pairs of the frozen corpus, version ``CORPUS_VERSION``."""
    specs = _corpus_specs()
    return specs + EXTENDED_SPECS if extended else specs


def builtin_corpus(extended=False, max_order=None):
    """(name, GeneratedGroup) pairs; ``max_order`` filters by closed-form order before building."""
    out = []
    for name, text in corpus_specs(extended):
        if max_order is not None and expected_order(text) > max_order:
            continue
        out.append((name, build(text)))
    return out
