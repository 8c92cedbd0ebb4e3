"""
qseries / polymul 测试
"""
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whmf.exceptions import IntegralityError, InvalidArgumentError, PrecisionError
from whmf.polymul import benchmark, karatsuba, mul_truncated, schoolbook
from whmf.qseries import (EtaQuotientSpec, QSeries, apply_Up, apply_Vp, eta_quotient, from_text,
                          invert, make, min_vp, series_product, to_text, vp)

RAMANUJAN_TAU = [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]

small_ints = st.integers(min_value=-50, max_value=50)


def series_of(length):
    return st.lists(small_ints, min_size=length, max_size=length).map(
        lambda cs: QSeries.from_ints(0, cs, len(cs)))


# ========== 基本读取 ==========
def test_coefficients_past_precision_raise():
    s = make(-1, [1, 2, 3], 2)
    assert s.coeff(-1) == 1
    assert s.coeff(-5) == 0
    with pytest.raises(PrecisionError):
        s.coeff(2)


def test_make_rejects_empty_window():
    with pytest.raises(InvalidArgumentError):
        make(3, [], 3)


def test_common_denominator_is_reduced():
    s = QSeries(0, [Fraction(1, 2), Fraction(1, 4), 2], 3)
    assert s.denominator == 4
    assert s.numerators == [2, 1, 8]
    assert not s.is_integral()
    with pytest.raises(IntegralityError):
        s.int_coeffs()
    assert (s * 4).is_integral()


def test_float_coefficients_are_rejected():
    with pytest.raises(InvalidArgumentError):
        QSeries(0, [0.5], 1)


def test_valuation_of_zero_is_infinite():
    z = QSeries.zero(5, val=0)
    assert z.valuation() == math.inf
    assert z.is_zero()
    assert QSeries.monomial(2, 6, 3).valuation() == 2


# ========== 算术 ==========
@settings(max_examples=60, deadline=None)
@given(series_of(12), series_of(12), series_of(12))
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert (a + b) * c == a * c + b * c
    assert a - a == QSeries.zero(12, val=0)


def test_product_precision_is_the_shorter_relative_length():
    a = QSeries.from_ints(-2, [1] * 10, 8)      # 相对长度 10
    b = QSeries.from_ints(1, [1] * 4, 5)        # 相对长度 4
    prod = a * b
    assert prod.val == -1
    assert prod.prec == 3


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=-40, max_value=40).filter(lambda x: x != 0),
       st.lists(small_ints, min_size=1, max_size=20),
       st.integers(min_value=-3, max_value=3))
def test_invert_round_trip(lead, rest, val):
    s = QSeries.from_ints(val, [lead] + rest, val + 1 + len(rest))
    inv = invert(s)
    assert inv.val == -val
    assert (s * inv) == QSeries.one(len(rest) + 1)


def test_invert_sparse_unit():
    # 1/(1 - q) = Σ q^n
    s = QSeries.from_ints(0, [1, -1] + [0] * 98, 100)
    assert invert(s).int_coeffs() == [1] * 100


def test_invert_needs_enough_input():
    s = QSeries.from_ints(0, [1, 2, 3], 3)
    with pytest.raises(PrecisionError):
        invert(s, 5)
    with pytest.raises(InvalidArgumentError):
        invert(QSeries.zero(4, val=0))


def test_negative_power_and_division():
    s = QSeries.from_ints(1, [2, 1, 0, 5, 7], 6)
    assert s ** -2 * s ** 2 == QSeries.one(5)
    assert (s / s) == QSeries.one(5)
    assert (s / 2).coeff(1) == 1


# ========== U_p / V_p ==========
@settings(max_examples=40, deadline=None)
@given(series_of(15), st.sampled_from([2, 3, 5]), st.integers(min_value=-4, max_value=4))
def test_up_undoes_vp(a, p, shift):
    a = a.shift(shift)
    assert apply_Up(apply_Vp(a, p), p) == a


def test_up_precision_rounds_up():
    a = QSeries.from_ints(-3, list(range(10)), 7)
    u = apply_Up(a, 2)
    assert (u.val, u.prec) == (-1, 4)
    assert u.coeff(-1) == a.coeff(-2)
    assert u.coeff(3) == a.coeff(6)
    v = apply_Vp(a, 3)
    assert (v.val, v.prec) == (-9, 21)


# ========== eta 商 ==========
def test_delta_from_eta():
    d = eta_quotient(EtaQuotientSpec(((1, 24),)), 11)
    assert d.val == 1
    assert d.int_coeffs() == RAMANUJAN_TAU


def test_eta_quotient_negative_exponent_inverts():
    a = eta_quotient([(2, 24), (1, -24)], 30)
    b = eta_quotient([(2, -24), (1, 24)], 28)
    assert a.val == 1 and b.val == -1
    assert (a * b) == QSeries.one(29)


def test_eta_quotient_rejects_fractional_order():
    with pytest.raises(InvalidArgumentError):
        EtaQuotientSpec(((1, 1),))
    with pytest.raises(InvalidArgumentError):
        EtaQuotientSpec(((0, 24),))
    assert EtaQuotientSpec(((1, 8), (2, 8))).weight() == 8


def test_series_product_plans_precision():
    delta = lambda n: eta_quotient([(1, 24)], n)
    prod = series_product([(delta, 1, 2), (delta, 1, -1)], 20)
    assert prod.prec == 20
    assert prod == delta(20)


# ========== 赋值与序列化 ==========
def test_vp():
    assert vp(0, 2) == math.inf
    assert vp(Fraction(3, 4), 2) == -2
    assert vp(-2 ** 10 * 5 * 13327, 2) == 10
    assert min_vp([], 3) == math.inf
    assert min_vp([9, 6, 0], 3) == 1


@pytest.mark.parametrize("p", [1, 0, -3])
def test_vp_needs_a_prime_base(p):
    with pytest.raises(InvalidArgumentError):
        vp(4, p)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.fractions(max_denominator=50), min_size=1, max_size=20),
       st.integers(min_value=-5, max_value=5))
def test_text_format_is_exact(coeffs, val):
    s = QSeries(val, coeffs, val + len(coeffs))
    text = to_text(s)
    back = from_text(text)
    assert back == s
    assert to_text(back) == text


def test_from_text_rejects_bad_input():
    with pytest.raises(InvalidArgumentError):
        from_text("")
    with pytest.raises(InvalidArgumentError):
        from_text("qseries val=0 prec=2\n0 1\n")
    with pytest.raises(InvalidArgumentError) as exc:
        from_text("qseries val=0 prec=1\n0\n")
    assert exc.value.hint
    with pytest.raises(InvalidArgumentError):
        from_text("qseries val=0 prec=1\n0 1/0\n")


# ========== 多项式乘法 ==========
@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(), min_size=0, max_size=120), st.lists(st.integers(), min_size=0, max_size=90))
def test_karatsuba_matches_schoolbook(a, b):
    assert karatsuba(a, b, threshold=4) == schoolbook(a, b)


def test_mul_truncated():
    a = list(range(1, 60))
    b = list(range(3, 80))
    assert mul_truncated(a, b, 30, threshold=8) == schoolbook(a, b)[:30]


def test_benchmark_reports_agreement():
    df = benchmark(sizes=(8, 32), digits=20, repeat=1, seed=1)
    assert list(df.columns) == ["size", "schoolbook_ms", "karatsuba_ms", "agree"]
    assert df["agree"].all()
