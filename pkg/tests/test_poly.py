from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from milnorfibre.poly import Interval, MultiPoly, PolySyntaxError, parse_poly

XYT = ("x", "y", "t")

small_rationals = st.fractions(min_value=-4, max_value=4, max_denominator=12)
exponents = st.tuples(*(st.integers(0, 3) for _ in XYT))
polys = st.dictionaries(exponents, small_rationals, max_size=5).map(lambda terms: MultiPoly(XYT, terms))
points = st.tuples(*(small_rationals for _ in XYT))


# -- evaluate ---------------------------------------------------------------


def test_germ_vanishes_at_origin():
    assert parse_poly("x^4+y^2").evaluate([0, 0]) == 0


def test_d4_minus_at_one_one():
    assert parse_poly("x^2*y-y^3").evaluate([1, 1]) == 0


def test_e8_family_at_ones():
    p = parse_poly("x^3+3*t*x+y^5", XYT)
    assert p.evaluate([1, 1, 1]) == 5


def test_evaluate_dimension_mismatch():
    with pytest.raises(ValueError):
        parse_poly("x+y").evaluate([1])


# -- derivatives ------------------------------------------------------------


def test_partial_a2_family():
    p = parse_poly("x^3+t*x+y^2", XYT)
    assert p.partial("x") == parse_poly("3*x^2+t", XYT)


def test_partial_d5_minus_family():
    p = parse_poly("x^2*y-y^4+4*t*y", XYT)
    assert p.partial("y") == parse_poly("x^2+4*(t-y^3)", XYT)


def test_partial_of_y_squared_in_x_is_zero():
    assert parse_poly("y^2", ("x", "y")).partial("x").is_zero()


def test_partial_unknown_variable():
    with pytest.raises(KeyError):
        parse_poly("x^2").partial("z")


def test_jacobian_e6_family():
    f = parse_poly("x^3+3*t*x+y^4", XYT)
    assert f.jacobian(("x", "y")) == [parse_poly("3*x^2+3*t", XYT), parse_poly("4*y^3", XYT)]


def test_jacobian_e7_family():
    f = parse_poly("x^3+3*t*x+x*y^3+t*y^3", XYT)
    assert f.jacobian(("x", "y")) == [parse_poly("3*(x^2+t)+y^3", XYT), parse_poly("3*y^2*(x+t)", XYT)]


def test_jacobian_of_constant_is_zero_row():
    row = MultiPoly.constant(7, ("x", "y")).jacobian(("x", "y"))
    assert len(row) == 2 and all(c.is_zero() for c in row)


def test_jacobian_needs_variables():
    with pytest.raises(ValueError):
        parse_poly("x").jacobian(())


def test_hessian_e7_family():
    f = parse_poly("x^3+3*t*x+x*y^3+t*y^3", XYT)
    h = f.hessian(("x", "y"))
    expect = [["6*x", "3*y^2"], ["3*y^2", "6*y*(x+t)"]]
    assert h == [[parse_poly(e, XYT) for e in row] for row in expect]


def test_hessian_a2_family():
    f = parse_poly("x^3+t*x+y^2", XYT)
    assert f.hessian(("x", "y")) == [[parse_poly("6*x", XYT), MultiPoly(XYT)], [MultiPoly(XYT), parse_poly("2", XYT)]]


def test_hessian_of_quadratic_tail_is_block_diagonal():
    v = ("x1", "x2", "x3")
    h = parse_poly("x1^2 + x2^2 - x3^2", v).hessian(v)
    diag = [h[i][i].evaluate([0, 0, 0]) for i in range(3)]
    assert diag == [2, 2, -2]
    assert all(h[i][j].is_zero() for i in range(3) for j in range(3) if i != j)


# -- substitute -------------------------------------------------------------


def test_substitute_d4_plus_family():
    p = parse_poly("x^2*y+2*t*x^2+y^3-t*y", XYT)
    q = p.substitute("t", F(-1, 4))
    assert q.variables == ("x", "y")
    assert q == parse_poly("x^2*y - x^2/2 + y^3 + y/4", ("x", "y"))


def test_substitute_zero_recovers_germ():
    p = parse_poly("x^4-4*t*x+y^2", XYT)
    assert p.substitute("t", 0) == parse_poly("x^4+y^2")


def test_substitute_into_constant():
    c = MultiPoly.constant(3, XYT)
    assert c.substitute("t", 5) == MultiPoly.constant(3, ("x", "y"))


def test_substitute_unknown_variable():
    with pytest.raises(KeyError):
        parse_poly("x").substitute("t", 1)


# -- intervals --------------------------------------------------------------


def test_square_over_symmetric_interval_encloses_range():
    r = parse_poly("x^2").eval_interval([Interval(-1, 1)])
    assert r.lo <= 0 and r.hi >= 1


def test_monotone_enclosure_excludes_zero():
    r = parse_poly("3*x^2+3*t", ("x", "t")).eval_interval([Interval(1, 2), Interval(F(1, 2), 1)])
    lo, hi = r.bounds()
    assert F(9, 2) <= lo and hi <= 15
    assert not r.contains_zero()


def test_constant_enclosure_is_a_point():
    assert MultiPoly.constant(5, ("x", "y")).eval_interval([Interval(-3, 2), Interval(0, 1)]) == Interval(5)


def test_interval_arithmetic_stays_exact_when_possible():
    assert Interval(1, 2) * Interval(3) == Interval(3, 6)
    third = Interval(F(1, 3))
    assert third.lo < third.hi and third.contains(F(1, 3))


def test_eval_interval_dimension_mismatch():
    with pytest.raises(ValueError):
        parse_poly("x*y").eval_interval([Interval(0, 1)])


# -- parser -----------------------------------------------------------------


def test_parser_accepts_both_power_spellings():
    assert parse_poly("x**3 - 2*y") == parse_poly("x^3-2*y")


def test_parser_rejects_garbage():
    with pytest.raises(PolySyntaxError):
        parse_poly("x^^2")


def test_canonical_variable_order():
    assert parse_poly("t*x1 + y + x").variables == ("x", "y", "x1", "t")


def test_printer_uses_lexicographic_order():
    assert str(parse_poly("x1^2*(-1) + x^2*y - y^3")) == "x^2*y - y^3 - x1^2"


# -- properties -------------------------------------------------------------


@given(polys, polys, points)
def test_evaluation_is_a_ring_map(p, q, pt):
    assert (p + q).evaluate(pt) == p.evaluate(pt) + q.evaluate(pt)
    assert (p * q).evaluate(pt) == p.evaluate(pt) * q.evaluate(pt)


@given(polys)
def test_mixed_partials_commute(p):
    assert p.partial("x").partial("y") == p.partial("y").partial("x")


@given(polys, st.lists(small_rationals, min_size=6, max_size=6), st.data())
def test_interval_evaluation_encloses(p, corners, data):
    box = [Interval(min(a, b), max(a, b)) for a, b in zip(corners[::2], corners[1::2])]
    pt = []
    for iv in box:
        lo, hi = iv.bounds()
        u = data.draw(st.fractions(min_value=0, max_value=1, max_denominator=16))
        pt.append(lo + u * (hi - lo))
    assert p.eval_interval(box).contains(p.evaluate(pt))


@given(polys, points)
def test_substitute_then_evaluate(p, pt):
    x, y, a = pt
    assert p.substitute("t", a).evaluate([x, y]) == p.evaluate([x, y, a])


@settings(max_examples=60)
@given(polys)
def test_print_parse_round_trip(p):
    assert parse_poly(str(p), XYT) == p
