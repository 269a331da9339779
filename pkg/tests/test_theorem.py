import decimal
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilpotwo import construct
from nilpotwo import table_group as tg
from nilpotwo import theorem as th
from nilpotwo.chain import GeneratedGroup
from nilpotwo.errors import OutOfTheoremRange
from nilpotwo.permutation import parse_permutation
from nilpotwo.structure import nilpotency_class, sylow_subgroup


def float_threshold(n, c, k=1):
    """Independent float oracle for n^(k / (c log2 log2 n))."""
    return n ** (k / (c * math.log2(math.log2(n))))


def test_threshold_examples():
    assert abs(th.bound_threshold(20160, 25) - 1.108826) < 1e-6
    assert abs(th.bound_threshold(20160, 25) - float_threshold(20160, 25)) < 1e-9
    assert abs(th.bound_threshold(3, 25) - 1.068373) < 1e-6
    assert th.bound_threshold(4, 1, 0) == 1.0
    assert abs(float(th.log2(20160)) - 14.299208) < 1e-6


@given(st.integers(7, 10**40), st.integers(1, 10**6))
def test_threshold_monotone(n, step):
    assert th.threshold_log2(n + step, 25) >= th.threshold_log2(n, 25)


@given(st.integers(3, 10**12))
def test_threshold_against_float(n):
    assert abs(float(th.threshold_log2(n, 25)) - math.log2(float_threshold(n, 25))) < 1e-9


def test_pass_rule():
    assert th.passes(decimal.Decimal(0))
    assert not th.passes(decimal.Decimal("-1e-12"))
    assert th.passes(decimal.Decimal("1e-30"))


def test_aut_formula():
    assert th.aut_order_alt_product([(8, 1)]).order == 40320
    assert th.aut_order_alt_product([(8, 2)]).order == 3_251_404_800
    assert th.aut_order_alt_product([(7, 1), (8, 3)]).order == math.factorial(7) * math.factorial(8) ** 3 * 6
    five = th.aut_order_alt_product([(5, 1)])
    assert five.order == 120
    assert five.flags == ["a=5 outside lemma hypothesis"]
    assert th.aut_order_alt_product([(9, 1)]).flags == []
    for bad in ([(6, 1)], [(4, 1)], [(8, 0)], [(8, 1), (8, 2)]):
        with pytest.raises(ValueError):
            th.aut_order_alt_product(bad)


def test_aut_log_bound():
    r = th.aut_order_alt_product([(8, 2)])
    # log2 |Aut| <= sum b (a log a + log b)
    assert r.log2 <= r.log_bound
    assert abs(float(r.log_bound) - 2 * (8 * 3 + 1)) < 1e-12


def test_certificate_round_trip():
    d8 = construct.dihedral(8)
    cert = th.certify_class2(d8)
    assert cert.cls == 2 and cert.size == 8
    assert th.verify_certificate(cert, d8) == (True, [])
    assert th.certify_class2(construct.symmetric(3)) is None
    c = th.certify_class2(construct.cyclic(5))
    assert c.cls == 1 and c.commutator_gens == []


def test_certificate_negatives():
    s4 = construct.symmetric(4)
    p = sylow_subgroup(s4, 2)
    cert = th.certify_class2(p)
    assert th.verify_certificate(cert, s4)[0]
    non_central = next(x for x in s4.generators if any(x * h != h * x for h in p.generators))
    cert.commutator_gens = [non_central] + cert.commutator_gens[1:]
    ok, reasons = th.verify_certificate(cert, s4)
    assert not ok and "commutation violated" in reasons
    outside = th.certify_class2(GeneratedGroup([parse_permutation("(1,2)", 4)]))
    ok, reasons = th.verify_certificate(outside, construct.alternating(4))
    assert not ok and reasons == ["membership"]
    wrong = th.certify_class2(construct.cyclic(4))
    wrong.size = 8
    assert th.verify_certificate(wrong, construct.cyclic(4)) == (False, ["order mismatch"])


def test_section_certificate_checks():
    s4 = construct.symmetric(4)
    a4 = GeneratedGroup(construct.alternating(4).generators, 4)
    ok_cert = th.AbelianSectionCertificate(s4, a4, 2)
    assert th.verify_certificate(ok_cert, s4) == (True, [])
    bad = th.AbelianSectionCertificate(s4, GeneratedGroup([parse_permutation("(1,2,3)", 4)]), 8)
    ok, reasons = th.verify_certificate(bad, s4)
    assert not ok and reasons == ["not normal"]
    non_abelian = th.AbelianSectionCertificate(s4, GeneratedGroup.trivial(4), 24)
    assert th.verify_certificate(non_abelian, s4) == (False, ["quotient not abelian"])


def test_thompson_examples():
    c = th.thompson_minimizer(construct.symmetric(4))
    assert (c.size, c.cls, c.info["section"]) == (4, 1, 4)
    e = th.thompson_minimizer(construct.extraspecial(2, 5))
    assert (e.size, e.cls, e.info["section"]) == (32, 2, 16)
    z = th.thompson_minimizer(construct.cyclic(12))
    assert z.size == 12 and z.cls == 1
    # table input: right-regular realisation
    t = tg.parse_table(tg.format_table(tg.from_generated(construct.dicyclic(8))))
    q = th.thompson_minimizer(t)
    assert q.size == 4 and q.subgroup.degree == 8


def test_thompson_tie_break_is_least_member_list():
    table = tg.from_generated(construct.symmetric(4))
    cert = th.thompson_minimizer(table)
    value, wit = tg.max_abelian_section(table)
    assert tuple(cert.info["witness_members"]) == tuple(wit[0].members)


def test_thompson_extraspecial_proper_subgroups_smaller():
    table = tg.from_generated(construct.extraspecial(2, 5))
    subs = tg.enumerate_subgroups(table)
    assert max(h.order // table.derived_subgroup(h).order for h in subs if h.order < 32) == 8


def test_thompson_heuristic_large():
    g = construct.dixon_tower(2)
    cert = th.thompson_minimizer(g, seed=0)
    assert cert.cls <= 2
    assert th.verify_certificate(cert, g)[0]


def test_class2_abelian_section():
    d8 = th.certify_class2(construct.dihedral(8))
    s = th.class2_abelian_section(d8)
    assert s.section_order == 4 and s.section_order ** 2 >= 8
    c = th.certify_class2(construct.cyclic(6))
    assert th.class2_abelian_section(c).section_order == 6
    e = th.certify_class2(construct.extraspecial(2, 5))
    s = th.class2_abelian_section(e, seed=4)
    assert s.section_order == 8
    assert th.verify_certificate(s, construct.extraspecial(2, 5))[0]


def test_solvable_pipeline_examples():
    r = th.solvable_pipeline(construct.symmetric(4))
    assert r.nilpotent.order == 8
    assert nilpotency_class(r.nilpotent) == 2
    assert r.section.section_order >= 4
    assert r.certificate.size >= 4
    assert th.verify_certificate(r.section, construct.symmetric(4))[0]
    assert all(d.holds for d in r.diagnostics)
    c = th.solvable_pipeline(construct.cyclic(9))
    assert c.certificate.size == 9
    with pytest.raises(ValueError):
        th.solvable_pipeline(construct.alternating(5))
    with pytest.raises(OutOfTheoremRange):
        th.solvable_pipeline(construct.cyclic(2))


def test_solvable_pipeline_dixon_2():
    g = construct.dixon_tower(2)
    r = th.solvable_pipeline(g)
    assert math.log2(r.section.section_order) >= float(th.threshold_log2(g.order, 3))
    assert th.verify_certificate(r.certificate, g)[0]


def diag(report, name):
    return next(d for d in report.diagnostics if d.inequality_id == name)


def test_main_pipeline_examples():
    a8 = th.main_pipeline(construct.alternating(8), "Alt(8)")
    assert a8.path == "socle"
    assert a8.certificate.size >= 9
    assert a8.passed and a8.margin > 0
    assert diag(a8, "elem3_claimed_step_a8").holds is False
    assert diag(a8, "elem3_found_a8").holds
    s4 = th.main_pipeline(construct.symmetric(4))
    assert s4.path == "solvable" and s4.radical_order == 24 and s4.passed
    c3 = th.main_pipeline(construct.cyclic(3))
    assert c3.certificate.size == 3
    assert abs(float(c3.threshold_log2) - math.log2(1.068373)) < 1e-5
    with pytest.raises(OutOfTheoremRange):
        th.main_pipeline(construct.cyclic(2))


def test_main_pipeline_report_fields():
    r = th.main_pipeline(construct.build("direct_product(symmetric(4), alternating(5))"), "x", 7)
    d = r.to_dict()
    assert list(d) == [
        "name", "order", "radical_order", "path", "subgroup_order", "class",
        "threshold_log2", "size_log2", "margin_log2", "diagnostics", "seed",
    ]
    assert d["order"] == "1440" and d["radical_order"] == "24" and d["seed"] == 7
    assert diag(r, "pyber_discount").holds
    assert diag(r, "main_bound").holds


def test_main_pipeline_socle_alt9():
    r = th.main_pipeline(construct.alternating(9))
    assert r.path == "socle"
    assert r.certificate.size == 27
    assert diag(r, "elem3_found_a9").holds


def test_main_pipeline_deterministic():
    g = construct.build("wreath(symmetric(3), 2)")
    assert th.main_pipeline(g, "w", 3).to_dict() == th.main_pipeline(g, "w", 3).to_dict()
