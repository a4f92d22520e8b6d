from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from logdeg.series import (I, LaurentSeries, RationalFunction, SeriesError, TruncationError,
                           expand_rational, format_scalar, gw_dt_compare, macmahon,
                           macmahon_power, normalize_dt, pade_reconstruct, parse_scalar,
                           scalar, series_from_ints)

from oracles import plane_partition_counts


def ints(s):
    return [int(s[k].x) for k in range(s.min_exp, s.trunc + 1)]


def test_macmahon_matches_brute_force():
    assert ints(macmahon(12)) == plane_partition_counts(12)


def test_macmahon_prints_with_error_term():
    assert str(macmahon(4)) == "1 + q + 3*q^2 + 6*q^3 + 13*q^4 + O(q^5)"


def test_macmahon_powers():
    assert ints(macmahon_power(1, 2)) == [1, -1, 3]
    m = macmahon(8)
    assert macmahon_power(3, 8) == (m ** 3).negate_variable()
    assert macmahon_power(-2, 8) * macmahon_power(2, 8) == LaurentSeries.constant(1, 8)
    with pytest.raises(SeriesError):
        macmahon(-1)


def test_normalize_dt():
    m = macmahon_power(3, 10)
    z = m * series_from_ints([1, 2, 5], 10)
    assert normalize_dt(z, m) == series_from_ints([1, 2, 5], 10)
    with pytest.raises(SeriesError):
        normalize_dt(z, LaurentSeries([], 11, 10))


def test_expand_rational():
    f = RationalFunction.parse("q/(1+q)**2")
    got = expand_rational(f, 0, 6)
    assert [got[k] for k in range(7)] == [scalar(x) for x in [0, 1, -2, 3, -4, 5, -6]]
    inv = expand_rational(RationalFunction.parse("1/q"), -3, 3)
    assert inv.terms() == {-1: scalar(1)}
    one = RationalFunction.parse("(1-q)/(1-q)")
    assert one.numerator == (1,) and one.denominator == (1,)


def test_expand_window_drops_low_terms():
    f = RationalFunction.parse("1/(q**2*(1-q))")
    assert min(expand_rational(f, 0, 4).terms()) == 0
    assert min(expand_rational(f, -5, 4).terms()) == -2


def test_pade_round_trip():
    f = RationalFunction.parse("(1+2*q)/(1-3*q+q**2)")
    s = expand_rational(f, 0, 12)
    assert pade_reconstruct(s, 2) == f


def test_pade_with_pole_at_zero():
    f = RationalFunction.parse("q/(1+q)**2")
    shifted = RationalFunction(f.numerator, (0,) + f.denominator)
    s = expand_rational(shifted, -1, 12)
    assert pade_reconstruct(s, 3) == shifted


def test_pade_constant_and_failure():
    assert pade_reconstruct(series_from_ints([5], 6), 1) == RationalFunction((5,))
    assert pade_reconstruct(macmahon(20), 4) is None
    with pytest.raises(SeriesError):
        pade_reconstruct(macmahon(3), 4)


def gw_oracle(order):
    u = sympy.Symbol("u")
    ser = sympy.series(1 / (4 * sympy.sin(u / 2) ** 2), u, 0, order + 1).removeO()
    terms = {int(k[0]): Fraction(str(c)) for k, c in sympy.Poly(ser * u ** 2, u).terms()}
    return LaurentSeries.from_dict({k - 2: c for k, c in terms.items()}, order, "u")


def test_gw_dt_for_the_point():
    z_pt = RationalFunction.parse("q/(1+q)**2")
    r = gw_dt_compare(z_pt, gw_oracle(10), 0, 0, 10)
    assert r.equal, r.report()
    assert r.lhs[-2] == scalar(1) and r.lhs[0] == scalar(Fraction(1, 12))


def test_gw_dt_detects_perturbation():
    z_pt = RationalFunction.parse("q/(1+q)**2")
    gw = gw_oracle(10) + LaurentSeries.monomial(6, 10, Fraction(1, 1000), "u")
    r = gw_dt_compare(z_pt, gw, 0, 0, 10)
    assert not r.equal and r.mismatch == 6
    assert "first_mismatch" in r.report()


def test_gw_dt_trivial_and_shifted():
    one = RationalFunction((1,))
    r = gw_dt_compare(one, LaurentSeries.constant(1, 8, "u"), 0, 0, 8)
    assert r.equal
    r = gw_dt_compare(one, LaurentSeries.monomial(-1, 8, I, "u"), 0, 1, 8)
    assert r.equal
    with pytest.raises(TruncationError):
        gw_dt_compare(one, LaurentSeries.constant(1, 4, "u"), 0, 0, 8)


def test_gaussian_scalars():
    assert I * I == scalar(-1)
    assert [format_scalar(x) for x in ["3/2", "-1/240", "i/4", "3i/2", "1/2-i"]] == \
        ["3/2", "-1/240", "i/4", "3i/2", "1/2-i"]
    assert parse_scalar("−2") == scalar(-2)
    with pytest.raises(SeriesError):
        parse_scalar("abc")
    with pytest.raises(SeriesError):
        scalar(1j)


def test_truncation_is_checked():
    s = macmahon(4)
    with pytest.raises(TruncationError):
        s.truncate(5)
    assert (s * macmahon(9)).trunc == 4


def test_json_round_trip():
    s = LaurentSeries([1, "i/2", 0, -3], -2, 5)
    assert LaurentSeries.from_json(s.to_json()) == s


series_st = st.builds(
    lambda cs, lo: LaurentSeries([Fraction(c) for c in cs], lo, lo + 6),
    st.lists(st.integers(-5, 5), min_size=1, max_size=7), st.integers(-2, 2))


@settings(max_examples=60, deadline=None)
@given(series_st, series_st, series_st)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b).agrees_with(b * a)
    assert ((a * b) * c).agrees_with(a * (b * c))
    assert (a * (b + c)).agrees_with(a * b + a * c)


@settings(max_examples=60, deadline=None)
@given(series_st)
def test_inverse_when_leading_term_is_nonzero(a):
    if a.is_zero():
        return
    one = a * a.inverse()
    assert one.agrees_with(LaurentSeries.constant(1, one.trunc))
