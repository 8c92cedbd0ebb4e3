"""
证书引擎：递推、测试形式、分解、Fricke 交叉核对、整体验证与扫描
"""
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import load_published
from whmf.config import WhmfConfig
from whmf.exceptions import DecompositionError, InvalidArgumentError, PrecisionError
from whmf.integral_bases import dim_mk
from whmf.level_one import a_coeff, canonical_form
from whmf.models import Decomposition
from whmf.qseries import QSeries
from whmf.tables import epsilon
from whmf.verifier import (Verifier, build_test_form, certify_constant_congruence, decompose,
                           decomposition_length, eisenstein_exclusion_note, g_form, is_excluded,
                           lambda_exceeds_epsilon, phi_alpha_powers, psi_theta_powers, recurrence_check,
                           reconstruct, reduction_chain_check, scan_table, scan_theorem1, single_coefficient_margin,
                           verify_all, verify_theorem5, zero_cusp_expansion)

PUBLISHED = load_published()
PRIMES = (2, 3, 5)
WEIGHTS = (4, 6, 8, 10, 14)
PAIRS = [(p, k) for p in PRIMES for k in WEIGHTS]
FAST = WhmfConfig(verify_prec_floor=0, verify_margin=20)


# ========== 系数递推 ==========
@settings(max_examples=200, deadline=None)
@given(st.sampled_from(PRIMES), st.sampled_from(WEIGHTS), st.integers(1, 6), st.integers(1, 6),
       st.integers(1, 2))
def test_recurrence(p, k, m, n, s):
    assert recurrence_check(p, k, m, n, s)


@pytest.mark.parametrize("p,k,m,n,r,s", [
    (2, 4, 1, 1, 2, 2), (2, 14, 3, 1, 1, 3), (3, 8, 1, 2, 2, 2), (5, 4, 1, 1, 1, 2), (3, 6, 2, 1, 0, 2),
])
def test_reduction_chain(p, k, m, n, r, s):
    assert reduction_chain_check(p, k, m, n, r, s)


def test_recurrence_argument_checks():
    with pytest.raises(InvalidArgumentError):
        recurrence_check(2, 4, 1, 1, 0)
    with pytest.raises(InvalidArgumentError):
        reduction_chain_check(2, 4, 2, 1, 1, 1)


def test_g_form():
    g = g_form(2, 4, 1, 1, 20)
    assert g.prec == 20
    # 主部相消
    assert g.valuation() >= 1
    # g 的系数就是递推中的组合 a_4(2, n) - a_4(1, n/2)
    for n in range(1, 20):
        expected = canonical_form(4, 2, 20).coefficient(n)
        if n % 2 == 0:
            expected -= canonical_form(4, 1, 10).coefficient(n // 2)
        assert g.coeff(n) == expected
    with pytest.raises(InvalidArgumentError):
        g_form(2, 4, 1, 0, 10)


# ========== 元数据 ==========
def test_exclusion_rule():
    assert is_excluded(2, 2, 6)
    assert is_excluded(3, 1, 2)
    assert not is_excluded(2, 1, 2)
    assert "rule" in eisenstein_exclusion_note()


@pytest.mark.parametrize("p,k", PAIRS)
def test_lambda_half_exceeds_epsilon(p, k):
    assert lambda_exceeds_epsilon(p, k)
    margin, applies = single_coefficient_margin(p, k)
    assert applies == (margin >= 0)


# ========== 测试形式 ==========
def test_published_decomposition_lengths():
    for row in PUBLISHED["decomposition_length"]:
        assert decomposition_length(row["p"], row["k"], row["j"]) == row["N"]


def test_test_form_range_of_j():
    with pytest.raises(InvalidArgumentError):
        build_test_form(2, 4, 2, 10)      # d(4, 2) = 2
    with pytest.raises(InvalidArgumentError):
        build_test_form(7, 4, 1, 10)


@pytest.mark.parametrize("j", [1, 2, 3])
def test_constant_terms_2_14(j):
    expected = PUBLISHED["constants_2_14"][j - 1]
    form = build_test_form(2, 14, j, 12)
    assert form.valuation() >= 0
    assert form.coeff(0) == expected


def test_test_form_is_holomorphic_when_p_divides_j():
    form = build_test_form(3, 14, 3, 20)
    assert form.val <= -1
    assert form.valuation() >= 0


@pytest.mark.parametrize("p,k", [(2, 14), (3, 8), (5, 4), (3, 14)])
def test_test_form_coefficients_match_dual_weight(p, k):
    # f_{2-k,j}|U_p 在 q^n 处为 a_{2-k}(j, pn) = -a_k(pn, j)，p | j 时再加 a_k(n, j/p)
    for j in range(1, dim_mk(k, p)):
        form = build_test_form(p, k, j, 7)
        for n in range(1, 7):
            expected = -a_coeff(k, p * n, j)
            if j % p == 0:
                expected += a_coeff(k, n, j // p)
            assert form.coeff(n) == expected, (p, k, j, n)


def test_zero_cusp_expansion_leading_term():
    F = zero_cusp_expansion(2, 4, 1, 5)
    assert F.valuation() == -4
    assert F.coeff(-4) == Fraction(1, 4)


# ========== 分解 ==========
def test_published_decomposition_3_8_1():
    expected = PUBLISHED["decomposition_3_8_1"]
    N = decomposition_length(3, 8, 1)
    assert N == expected["N"]
    prec = 40
    dec = decompose(build_test_form(3, 8, 1, prec), 8, 3, prec, N=N)
    assert dec.remainder_ok
    assert dec.B == expected["B"]
    assert min(dec.valuations[1:]) >= expected["min_vp_igt0"]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(PAIRS), st.lists(st.integers(-10 ** 6, 10 ** 6), min_size=1, max_size=8))
def test_decompose_round_trip(pair, B):
    p, k = pair
    prec = len(B) + 12
    f = reconstruct(B, k, p, prec)
    dec = decompose(f, k, p, prec, N=len(B) - 1)
    assert dec.B == B
    assert dec.N == len(B) - 1


def test_decompose_trims_trailing_zeros():
    f = reconstruct([5, 0, 7], 4, 2, 40)
    dec = decompose(f, 4, 2, 40)
    assert dec.B == [5, 0, 7]
    assert dec.N == 2
    assert dec.valuations == [0, math.inf, 0]


def test_decompose_errors():
    f = reconstruct([1, 2, 3], 6, 3, 30)
    with pytest.raises(DecompositionError):
        decompose(f, 6, 3, 30, N=1)
    with pytest.raises(PrecisionError):
        decompose(f, 6, 3, 40, N=2)
    with pytest.raises(DecompositionError):
        decompose(QSeries.monomial(-1, 20), 6, 3, 20, N=2)


def test_decompose_checks_enough_coefficients():
    f = reconstruct([1, 2, 3], 6, 3, 12)
    # 只剩 9 个系数可核对，默认至少要 10 个
    with pytest.raises(PrecisionError):
        decompose(f, 6, 3, 12, N=2)
    assert decompose(f, 6, 3, 12, N=2, min_check=5).B == [1, 2, 3]


def test_power_tables_are_monic():
    for i, s in enumerate(phi_alpha_powers(5, 8, 6, 20)):
        assert s.valuation() == i and s.coeff(i) == 1 and s.prec == i + 20
    for i, s in enumerate(psi_theta_powers(2, 4, 4, 10)):
        assert s.valuation() == -i - 1 and s.coeff(-i - 1) == 1


def test_certify_constant_congruence():
    dec = Decomposition(p=3, k=8, target="", B=[Fraction(-480), Fraction(3 ** 5), Fraction(0)], N=2,
                        valuations=[1, 5, math.inf], remainder_ok=True, prec=10)
    assert certify_constant_congruence(dec, 3, 2)
    assert certify_constant_congruence(dec, 3, 2, K_expected=-480)
    assert not certify_constant_congruence(dec, 3, 2, K_expected=1)
    assert not certify_constant_congruence(dec, 6, 2)
    assert not certify_constant_congruence(dec, 3, 1)


# ========== 整体验证 ==========
def test_single_test_cross_checks():
    result, dec = Verifier(FAST).test_one(3, 8, 1)
    assert result.N == 7
    assert result.constant == -480
    assert result.divides
    assert result.direct_scan_ok is True
    assert result.fricke_consistent is True
    assert result.min_vp_Bi_igt0 >= 5
    assert dec.B[0] == result.constant


def test_checks_can_be_disabled():
    config = WhmfConfig(verify_prec_floor=0, verify_margin=20, direct_scan=False, fricke_cross_check=False)
    result, _ = Verifier(config).test_one(2, 6, 1)
    assert result.direct_scan_ok is None
    assert result.fricke_consistent is None
    assert result.divides


def test_working_precision():
    verifier = Verifier(WhmfConfig())
    assert verifier.working_prec(3, 8, 1) == 500
    assert Verifier(FAST).working_prec(5, 14, 6) == 144 + 7 + 20


def test_working_precision_keeps_room_for_remainder_check():
    verifier = Verifier(WhmfConfig(verify_prec_floor=0, verify_margin=0))
    assert verifier.working_prec(2, 4, 1) == decomposition_length(2, 4, 1) + dim_mk(4, 2) + 10


def test_verify_2_4_on_cold_cache(cold_caches):
    report = verify_theorem5(2, 4, config=FAST)
    assert report.passed
    assert len(report.tests) == dim_mk(4, 2) - 1


@pytest.mark.parametrize("p,k", [
    pytest.param(p, k, marks=pytest.mark.slow) if (p, k) == (5, 14) else (p, k) for p, k in PAIRS
])
def test_verify_pair(p, k):
    report = verify_theorem5(p, k, config=FAST)
    assert report.passed
    assert report.d == dim_mk(k, p)
    assert len(report.tests) == report.d - 1
    eps = epsilon(k, p)
    for t in report.tests:
        assert t.min_vp_Bi_igt0 >= eps
        assert t.vp_B0 >= eps - report.nu


def test_verify_2_14_constants():
    report = verify_theorem5(2, 14, config=FAST)
    assert [t.constant for t in report.tests] == PUBLISHED["constants_2_14"]


@pytest.mark.slow
def test_verify_at_default_precision():
    report = verify_theorem5(3, 8)
    assert report.passed
    assert report.prec == 500


def test_verify_all_sequential():
    reports = verify_all([(2, 4), (3, 4)], FAST)
    assert [(r.p, r.k) for r in reports] == [(2, 4), (3, 4)]
    assert all(r.passed for r in reports)


def test_verify_rejects_unsupported_pair():
    with pytest.raises(InvalidArgumentError):
        verify_theorem5(2, 12, config=FAST)


# ========== 扫描 ==========
@pytest.mark.parametrize("p,k", PAIRS)
def test_scan_has_no_violations(p, k):
    assert scan_theorem1(p, k, range(1, 7), range(1, 33)) == []


@pytest.mark.parametrize("row", PUBLISHED["tightness"])
def test_scan_bound_is_tight(row):
    df = scan_table(row["p"], row["k"], [row["m"]], [row["n"]])
    assert len(df) == 1
    assert df.iloc[0]["vp"] == row["vp"]
    assert df.iloc[0]["bound"] == row["vp"]
    assert bool(df.iloc[0]["ok"])


def test_scan_table_columns_and_exclusion():
    df = scan_table(2, 4, 4, 4, s_max=1)
    assert list(df.columns) == ["m", "n", "vp_m", "vp_n", "bound", "vp", "ok"]
    assert not ((df["vp_m"] == df["vp_n"]).any())
    assert df["ok"].all()
    assert 8 in set(df["m"])


@pytest.mark.parametrize("p,k", [
    pytest.param(p, k, marks=pytest.mark.slow) if p == 5 else (p, k) for p, k in PAIRS
])
def test_scan_with_prime_power_multiples(p, k):
    # m ≤ 8 乘以 p^s（s ≤ 2），n 取 p ∤ n
    ns = [n for n in range(1, dim_mk(k, p) + 31) if n % p]
    df = scan_table(p, k, range(1, 9), ns, s_max=2)
    assert df["ok"].all()
    assert (df["m"] % p ** 2 == 0).any()
