from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from milnorfibre.germ import build_germ, enumerate_catalog, parse_code
from milnorfibre.morsify import (
    PARAM,
    ParameterOutOfRange,
    ParamInterval,
    RootBound,
    build_family,
    family_at,
    iroot_floor,
    representative_t,
)
from milnorfibre.poly import parse_poly

CATALOG = enumerate_catalog(12, 3)
FAMILIES = [build_family(d) for d in CATALOG]


def family(code):
    return build_family(parse_code(code))


def test_a2_plus_family():
    fam = family("A2+s0n1")
    assert fam.deformed == parse_poly("x^3+t*x+y^2", fam.deformed.variables)
    assert str(fam.interval) == "[0, 1]"


def test_a3_plus_family():
    fam = family("A3+s0n1")
    assert fam.deformed == parse_poly("x^4-4*t*x+y^2", fam.deformed.variables)
    assert str(fam.interval) == "[0, 1]"


def test_d5_plus_family_and_interval():
    fam = family("D5+s0n1")
    assert fam.deformed == parse_poly("x^2*y+2*t*x^2+y^4-t*y", fam.deformed.variables)
    iv = fam.interval
    assert iv.lo_open and not iv.hi_open and iv.hi == 0
    assert iv.lo == RootBound(F(1, 32), 2, -1)


def test_family_at_zero_recovers_germ():
    assert family_at(family("A2+s0n1"), 0) == parse_poly("x^3+y^2")


def test_e7_family_at_one():
    assert family_at(family("E7s0n1"), 1) == parse_poly("x^3+3*x+x*y^3+y^3")


def test_d5_plus_family_rejects_minus_half():
    with pytest.raises(ParameterOutOfRange):
        family_at(family("D5+s0n1"), F(-1, 2))


def test_d5_plus_interval_boundary_is_exact():
    iv = family("D5+s0n1").interval
    # (1/32)^(1/2) lies strictly between 0.17677 and 0.17678
    assert iv.contains(F(-17677, 100000))
    assert not iv.contains(F(-17678, 100000))
    assert not iv.contains(F(1, 100))


@pytest.mark.parametrize("code, t", [("A2+s0n1", F(1, 2)), ("A3-s0n1", F(-1, 2)), ("D4+s0n1", F(-1, 2))])
def test_representative_t_on_unit_intervals(code, t):
    assert representative_t(family(code)) == t


def test_representative_t_for_d5_plus():
    t = representative_t(family("D5+s0n1"))
    bound = RootBound(F(1, 32), 2, -1)
    assert t < 0 and bound.compare(2 * t) <= 0 and abs(float(bound) / 2 - float(t)) < 1e-11


def test_representative_t_for_e7():
    assert representative_t(family("E7s0n1")) == F(1, 10)


def test_interval_must_touch_zero():
    with pytest.raises(ValueError):
        ParamInterval(F(1), F(2))


def test_iroot_floor():
    assert [iroot_floor(n, 3) for n in (0, 1, 7, 8, 26, 27, 10**30)] == [0, 1, 1, 2, 2, 3, 10**10]


def test_json_keeps_the_endpoint_exact():
    js = family("D7+s0n1").to_json()
    assert js["interval"]["lo"] == "-(1/192)^(1/4)"
    assert js["case_tag"] == "D+odd"


@given(st.sampled_from(FAMILIES))
def test_family_reduces_to_germ(fam):
    assert fam.deformed.substitute(PARAM, 0) == build_germ(fam.germ)


@given(st.sampled_from(FAMILIES))
def test_family_is_linear_in_t(fam):
    assert fam.deformed.degree(PARAM) == 1


@given(st.sampled_from(FAMILIES))
def test_tail_does_not_depend_on_t(fam):
    t_index = fam.deformed.variables.index(PARAM)
    tail = [i for i, v in enumerate(fam.deformed.variables) if v.startswith("x") and v != "x"]
    for exps in fam.deformed.terms:
        if any(exps[i] for i in tail):
            assert exps[t_index] == 0


@given(st.sampled_from(FAMILIES))
def test_representative_t_inside_and_small(fam):
    t = representative_t(fam)
    assert t != 0 and fam.interval.contains(t)
    width = abs(float(fam.interval.far_endpoint()))
    assert abs(float(t)) <= width / 2 + 1e-15
