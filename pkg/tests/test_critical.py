from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from milnorfibre.critical import (
    CriticalPoint,
    SignatureUndecided,
    berkowitz,
    certify_points,
    closed_form_points,
    hessian_signature,
    hessian_signature_at,
    inertia_from_charpoly,
    morse_report,
    root_enclosure,
    standard_box,
    suspend_index,
)
from milnorfibre.germ import enumerate_catalog, parse_code
from milnorfibre.morsify import build_family, family_at, representative_t
from milnorfibre.poly import Interval

CATALOG = enumerate_catalog(9, 3)


def fam(code):
    return build_family(parse_code(code))


def kinds(certs):
    out = {}
    for c in certs:
        out[c.kind] = out.get(c.kind, 0) + 1
    return out


# -- closed forms -----------------------------------------------------------


def test_a3_plus_point():
    (p,) = closed_form_points(fam("A3+s0n1"), F(1, 2))
    assert p.location[0].contains(0.5 ** (1 / 3)) and p.location[0].width < 1e-12
    assert p.morse_index == 0 and p.signature == (2, 0, 0)


def test_d6_minus_has_two_points():
    pts = closed_form_points(fam("D6-s0n1"), F(1, 2))
    ys = sorted(p.location[1].mid for p in pts)
    assert ys == pytest.approx([-(0.5**0.25), 0.5**0.25], abs=1e-12)
    assert [p.morse_index for p in pts] == [1, 1]


def test_e6_plus_has_none():
    assert closed_form_points(fam("E6+s0n1"), F(1, 2)) == []


def test_closed_form_rejects_t_zero():
    with pytest.raises(ValueError):
        closed_form_points(fam("A3+s0n1"), 0)


def test_d_plus_odd_point_solves_the_defining_equations():
    (p,) = closed_form_points(fam("D7+s0n1"), F(-1, 10))
    y = p.location[1]
    # (k-1) y^(k-2) = t with k = 7
    assert (6 * y**5).contains(F(-1, 10))


def test_e7_point_location():
    t = F(1, 10)
    (p,) = closed_form_points(fam("E7s0n1"), t)
    assert p.location[0].contains(-0.1)
    assert p.location[1].contains(-((3 * (0.01 + 0.1)) ** (1 / 3)))


def test_root_enclosure_is_exact_bracket():
    r = root_enclosure(F(2), 2)
    lo, hi = r.bounds()
    assert lo**2 <= 2 <= hi**2 and r.width < 1e-12
    assert root_enclosure(F(-8), 3).contains(-2)


# -- interval solver --------------------------------------------------------


def test_a2_plus_has_no_critical_points():
    certs = certify_points(family_at(fam("A2+s0n1"), F(1, 2)), standard_box(2))
    assert kinds(certs) == {"no_zero": len(certs)}


def test_d6_minus_solver_finds_two():
    certs = certify_points(family_at(fam("D6-s0n1"), F(1, 2)), standard_box(2))
    assert kinds(certs).get("unique_zero") == 2 and "undecided" not in kinds(certs)


def test_e7_solver_finds_one():
    certs = certify_points(family_at(fam("E7s0n1"), F(1, 10)), standard_box(2))
    assert kinds(certs).get("unique_zero") == 1 and "undecided" not in kinds(certs)


def test_unique_boxes_are_disjoint_and_small():
    certs = certify_points(family_at(fam("D8-s0n1"), F(1, 2)), standard_box(2))
    uniq = [c.box for c in certs if c.kind == "unique_zero"]
    assert len(uniq) == 2
    a, b = uniq
    assert not all(x.intersects(y) for x, y in zip(a, b))
    assert max(iv.width for box in uniq for iv in box) <= 1e-9


def test_tiny_budget_reports_undecided():
    certs = certify_points(family_at(fam("D6-s0n1"), F(1, 2)), standard_box(2), budget=3)
    assert "undecided" in kinds(certs)


# -- Hessian inertia --------------------------------------------------------


def test_a3_minus_index_one():
    f = family_at(fam("A3-s0n1"), F(-1, 2))
    (p,) = closed_form_points(fam("A3-s0n1"), F(-1, 2))
    assert hessian_signature_at(f, p) == (1, 1, 0)


def test_e7_signature():
    f = family_at(fam("E7s0n1"), F(1, 10))
    (p,) = closed_form_points(fam("E7s0n1"), F(1, 10))
    assert hessian_signature_at(f, p) == (1, 1, 0)


def test_berkowitz_matches_known_charpoly():
    one, zero = F(1), F(0)
    m = [[F(2), F(1)], [F(1), F(2)]]
    assert berkowitz(m, zero, one) == [1, -4, 3]
    m3 = [[F(1), F(2), F(0)], [F(2), F(1), F(0)], [F(0), F(0), F(-5)]]
    # (l+5)(l^2-2l-3)
    assert berkowitz(m3, zero, one) == [1, 3, -13, -15]


def test_inertia_of_exact_polynomials():
    iv = lambda *cs: [Interval(c) for c in cs]
    assert inertia_from_charpoly(iv(1, -4, 3)) == (2, 0, 0)
    # eigenvalues 3, -1, -5
    assert inertia_from_charpoly(iv(1, 3, -13, -15)) == (1, 2, 0)
    assert inertia_from_charpoly(iv(1, 0, -1)) == (1, 1, 0)


def test_straddling_constant_term_is_undecided():
    with pytest.raises(SignatureUndecided):
        inertia_from_charpoly([Interval(1), Interval(-2), Interval(-0.1, 0.1)])


def test_degenerate_point_cannot_be_certified():
    with pytest.raises(ValueError):
        CriticalPoint((Interval(0), Interval(0)), 0, (1, 0, 1), True, "closed_form")


def test_suspend_index():
    assert suspend_index(0, 0) == 0
    assert suspend_index(1, 3) == 4
    with pytest.raises(ValueError):
        suspend_index(3, 0)


# -- reports ----------------------------------------------------------------


@pytest.mark.parametrize("code, count, indices", [("D5+s0n1", 1, (1,)), ("D4+s0n1", 0, ()), ("A2-s0n1", 0, ())])
def test_morse_report(code, count, indices):
    r = morse_report(parse_code(code))
    assert (r.count, r.indices) == (count, indices)
    assert r.certified and r.closed_form_matches_oracle


def test_morse_report_json():
    js = morse_report(parse_code("E7s1n2")).to_json()
    assert js["schema_version"] == 1 and js["t0"] == "1/10" and js["indices"] == [2]
    assert js["certificate_counts"]["undecided"] == 0


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(CATALOG))
def test_oracle_agreement_over_the_catalog(d):
    r = morse_report(d)
    assert r.certified and r.closed_form_matches_oracle
    assert len(r.closed_form) == r.count


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([d for d in CATALOG if d.n == 1]))
def test_index_is_stable_as_t_shrinks(d):
    f = build_family(d)
    t = representative_t(f)
    a = morse_report(d, t)
    b = morse_report(d, t / 4)
    assert a.indices == b.indices


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([d for d in CATALOG if d.n >= 2]))
def test_suspended_points_sit_on_the_curve_plane(d):
    r = morse_report(d)
    for p in r.oracle:
        for iv in p.location[2:]:
            assert iv.contains(0.0) and iv.width < 1e-6
    curve = morse_report(d.curve)
    assert r.indices == tuple(sorted(suspend_index(i, d.s) for i in curve.indices))
