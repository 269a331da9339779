import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilpotwo import construct
from nilpotwo.chain import GeneratedGroup
from nilpotwo.errors import CapExceededError, ParseError
from nilpotwo.structure import center, nilpotency_class


def test_build_examples():
    assert construct.build("symmetric(5)").order == 120
    assert construct.build("alternating(8)").order == 20160
    e = construct.build("extraspecial(2, 5)")
    assert e.order == 32
    assert nilpotency_class(e) == 2
    assert center(e).order == 2
    assert construct.build("family(symmetric, 4)") == construct.symmetric(4)
    assert construct.build(construct.FamilySpec("cyclic", (5,))).order == 5


def test_corpus_orders_match_formulas():
    for name, text in construct.corpus_specs():
        assert construct.build(text).order == construct.expected_order(text), name


def test_corpus_shape():
    names = [n for n, _ in construct.corpus_specs()]
    assert len(names) == len(set(names)) == 155
    corpus = dict(construct.builtin_corpus(max_order=256))
    assert len(corpus) >= 40
    assert corpus["Sym(4)"].order == 24
    assert nilpotency_class(corpus["extraspecial_2_5"]) == 2
    big = dict(construct.corpus_specs())
    assert construct.expected_order(big["dixon_tower_2"]) == 24 ** 5
    assert construct.CORPUS_VERSION == 1
    ext = [n for n, _ in construct.corpus_specs(extended=True)]
    assert ext[-2:] == ["dixon_tower_3", "Alt(9)"]


def test_direct_product():
    a5 = construct.alternating(5)
    p = construct.direct_product(a5, a5)
    assert (p.order, p.degree) == (3600, 10)
    t = construct.direct_product(construct.symmetric(4), construct.cyclic(1))
    assert t.order == 24 and t.degree == 5
    s = construct.build("direct_product(symmetric(3), cyclic(2))")
    assert s.order == 12 and nilpotency_class(s) is None


def test_wreath():
    w = construct.build("wreath(symmetric(4), 4)")
    assert (w.degree, w.order) == (16, 24 ** 5) == (16, 7_962_624)
    assert construct.wreath_product(construct.symmetric(4), 1) == construct.symmetric(4)
    d8 = construct.build("wreath(cyclic(2), 2)")
    assert d8.order == 8 and nilpotency_class(d8) == 2
    with pytest.raises(CapExceededError):
        construct.wreath_product(construct.symmetric(4), 2000)


def test_wreath_order_law_on_corpus():
    for name, text in construct.corpus_specs():
        spec = construct.parse_family(text)
        if spec.tag != "wreath":
            continue
        base, k = spec.params
        from math import factorial

        assert construct.build(text).order == construct.build(base).order ** k * factorial(k), name


def test_dixon_tower():
    assert construct.dixon_tower(1) == construct.symmetric(4)
    assert construct.dixon_tower(2).order == 24 ** 5
    assert construct.dixon_tower_order(3) == 24 ** 21
    with pytest.raises(CapExceededError):
        construct.dixon_tower(4)
    with pytest.raises(ValueError):
        construct.dixon_tower(0)


@pytest.mark.parametrize("a,order", [(3, 3), (8, 9), (9, 27), (11, 27), (12, 81)])
def test_elem3_in_alt(a, order):
    e = construct.elem3_in_alt(a)
    alt = construct.alternating(a)
    assert e.order == order
    assert e.is_abelian()
    assert all(x.order() == 3 for x in e.elements() if not x.is_identity())
    assert e.is_subgroup_of(alt)


def test_elem3_claimed_comparison():
    assert 3 ** (8 // 3) == 9 < 16 == 2 ** (8 // 2)
    assert 3 ** (9 // 3) >= 2 ** 4.5


def test_small_families():
    assert construct.dihedral(4).order == 4
    assert construct.dicyclic(8).order == 8
    assert construct.sl2(3).order == 24
    assert construct.psl3(2).order == 168
    assert construct.psl3(4).order == 20160
    assert construct.cyclic(1).order == 1
    assert isinstance(construct.cyclic(1), GeneratedGroup)
    with pytest.raises(ValueError):
        construct.dicyclic(6)
    with pytest.raises(ValueError):
        construct.build("cyclic(2, 3)")


@pytest.mark.parametrize("text,column", [
    ("cyclic(", 8),
    ("cyclic(4", 9),
    ("nonsense(4)", 1),
    ("cyclic 4", 8),
    ("cyclic(4))", 10),
    ("symmetric(4) $", 14),
    ("wreath(symmetric(4),, 2)", 21),
])
def test_parse_family_errors(text, column):
    with pytest.raises(ParseError) as info:
        construct.parse_family(text)
    assert info.value.column == column


def test_parse_family_aliases():
    assert construct.parse_family("dixon(2)") == construct.FamilySpec("dixon_tower", (2,))
    assert construct.parse_family("product(cyclic(2), cyclic(3))").tag == "direct_product"
    assert str(construct.parse_family("wreath( symmetric(4) , 2 )")) == "wreath(symmetric(4), 2)"


@given(st.sampled_from([t for _, t in construct.corpus_specs()]))
def test_spec_text_round_trip(text):
    spec = construct.parse_family(text)
    assert construct.parse_family(str(spec)) == spec
