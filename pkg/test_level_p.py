"""
水平 p：S/T、权 2 形式、新形式、Φ/ψ、θ/α 表与 Fricke 展开
"""
import json
from fractions import Fraction

import pytest

from whmf.exceptions import InvalidArgumentError, PrecisionError
from whmf.level_one import canonical_form, delta, eisenstein, jfunc
from whmf.level_p import (alpha_congruence_certificate, apply_Tp, blocks, build_recipe, congruent_to_one,
                          export_theta_alpha, fricke_Up_image, hecke_Vp_identity, lam, newform, phi, psi,
                          s_form, t_form, theta_alpha, weight2_form, weight2_variant)
from whmf.qseries import QSeries, apply_Up, apply_Vp
from whmf.tables import NEGATIVE_WEIGHTS, epsilon, epsilon_table, theta_alpha_row

PRIMES = (2, 3, 5)
ROWS = [(k, p) for p in PRIMES for k in NEGATIVE_WEIGHTS]


def test_lambda():
    assert [lam(p) for p in PRIMES] == [24, 12, 6]
    with pytest.raises(InvalidArgumentError):
        lam(11)


def test_s_form_coefficients():
    # S_{4,2} = Σ (σ_3(n) - σ_3(n/2)) q^n
    s = s_form(4, 2, 6)
    assert s.integral
    assert s.series.int_coeffs() == [0, 1, 8, 28, 64, 126]


@pytest.mark.parametrize("k,p", [(4, 2), (6, 2), (4, 3)])
def test_integral_t_forms(k, p):
    t = t_form(k, p, 30)
    assert t.integral
    assert t.series.coeff(0) == 1


def test_non_integral_t_form_is_not_flagged():
    t = t_form(6, 5, 10)
    assert not t.integral
    assert not t.series.is_integral()


@pytest.mark.parametrize("p", PRIMES)
def test_weight2_variants_agree(p):
    w = weight2_form(p, 40)
    assert w.series.is_integral()
    assert w.series.coeff(0) == 1
    assert weight2_variant(p, 40).series == w.series


def test_weight2_form_level_2_coefficients():
    # 2E_2(2τ) - E_2(τ) = 1 + 24q + 24q^2 + 96q^3 + 24q^4 + ...
    assert [weight2_form(2, 5).series.coeff(n) for n in range(5)] == [1, 24, 24, 96, 24]


@pytest.mark.parametrize("name,level,weight", [
    ("Xi8", 2, 8), ("Xi10", 2, 10), ("Omega6", 3, 6), ("Lambda4", 5, 4), ("Lambda6", 5, 6),
])
def test_newforms_are_normalized_cusp_forms(name, level, weight):
    f = newform(name, 30)
    assert (f.p, f.weight) == (level, weight)
    assert f.series.valuation() == 1
    assert f.series.coeff(1) == 1
    assert f.series.is_integral()


def test_newform_hecke_eigenvalue_at_level():
    # 新形式的 U_p 特征值为 ±p^{k/2-1}
    for name, p, weight in (("Xi8", 2, 8), ("Omega6", 3, 6), ("Lambda4", 5, 4)):
        f = newform(name, 5 * 40).series
        lead = f.coeff(p)
        assert abs(lead) == p ** (weight // 2 - 1)
        assert apply_Up(f, p).agrees_with(f * lead)


def test_unknown_newform():
    with pytest.raises(InvalidArgumentError):
        newform("Xi12", 10)


@pytest.mark.parametrize("p", PRIMES)
def test_phi_psi_inverse(p):
    f, g = phi(p, 40), psi(p, 38)
    assert (f.weight, f.p, f.integral) == (0, p, True)
    assert (g.weight, g.p, g.integral) == (0, p, True)
    assert f.series.val == 1
    assert g.series.val == -1
    assert (f.series * g.series) == QSeries.one(39)


@pytest.mark.parametrize("p", [4, 7, 13])
def test_phi_psi_reject_unsupported_levels(p):
    with pytest.raises(InvalidArgumentError):
        lam(p)
    with pytest.raises(InvalidArgumentError):
        phi(p, 10)
    with pytest.raises(InvalidArgumentError):
        psi(p, 10)


@pytest.mark.parametrize("k,p", [(12, 2), (16, 2), (2, 2), (3, 3)])
def test_s_t_forms_reject_unsupported_weights(k, p):
    with pytest.raises(InvalidArgumentError):
        s_form(k, p, 10)
    with pytest.raises(InvalidArgumentError):
        t_form(k, p, 10)


def test_xi10_on_cold_cache(cold_caches):
    f = newform("Xi10", 30)
    assert f.series.prec == 30
    assert [f.series.coeff(n) for n in (1, 2, 3)] == [1, 16, -156]
    entry = theta_alpha(-2, 2, 30)
    assert entry.alpha.prec == 30
    assert entry.theta.coeff(entry.theta.val) == 1


def test_hecke_operators():
    e4 = eisenstein(4, 60)
    t2 = apply_Tp(e4, 2, 4)
    # E_4 是 T_2 的特征形式，特征值 σ_3(2) = 9
    assert t2.agrees_with(e4 * 9)
    assert hecke_Vp_identity(e4, 4, 2)
    assert hecke_Vp_identity(canonical_form(-4, 3, 50).series, -4, 3)


def test_apply_Tp_delta_and_level_p_form():
    t2 = apply_Tp(delta(40), 2, 12)
    assert t2.coeff(1) == -24
    assert t2.agrees_with(delta(40) * -24)
    assert apply_Tp(QSeries.one(30), 3, 4) == QSeries.one(10) * (1 + 3 ** 3)

    s = s_form(4, 2, 40)
    image = apply_Tp(s, 2)
    assert image.weight == 4 and image.p == 2
    assert image.series == apply_Tp(s.series, 2, 4)
    with pytest.raises(InvalidArgumentError):
        apply_Tp(s.series, 2)


def test_fricke_image_of_level_one_form_needs_precision():
    f = canonical_form(-4, 1, 10).series
    with pytest.raises(PrecisionError):
        fricke_Up_image(f, -4, 2, 12)
    image = fricke_Up_image(f, -4, 2, 10)
    assert image.prec == 10
    assert image.coeff(-4) == Fraction(1, 16)


def test_fricke_image_of_j():
    j = jfunc(20)
    image = fricke_Up_image(j, 0, 2, 20)
    expected = -j + apply_Vp(apply_Up(j, 2), 2).truncate(20) * 2 + apply_Vp(j, 4).truncate(20)
    assert image == expected


def test_epsilon_table():
    table = epsilon_table()
    assert len(table) == 15
    assert epsilon(4, 2) == 7
    assert epsilon(8, 3) == 3
    assert all(epsilon(k, 5) == 1 for k in (4, 6, 8, 10, 14))
    with pytest.raises(InvalidArgumentError):
        epsilon(12, 2)


def test_recipe_blocks():
    table = blocks(3)
    assert set(table) >= {"Delta1", "Delta3", "Omega6", "S4", "T4", "Phi", "Psi"}
    with pytest.raises(InvalidArgumentError):
        build_recipe({"Nope": 1}, 3, 10)


@pytest.mark.parametrize("k,p", ROWS)
def test_theta_alpha_shape(k, p):
    row = theta_alpha_row(k, p)
    entry = theta_alpha(k, p, 30)
    assert entry.pole_order_at_infty == row["pole_order"]
    assert entry.theta.val == -row["pole_order"]
    assert entry.theta.coeff(-row["pole_order"]) == 1
    assert entry.alpha.coeff(0) == 1
    assert entry.alpha.prec == 30
    assert (entry.mu, entry.nu) == (row["mu"], row["nu"])


@pytest.mark.parametrize("k,p", [row for row in ROWS if theta_alpha_row(*row)["nu"] > 0])
def test_alpha_congruences(k, p):
    entry = theta_alpha(k, p, 200)
    cert = alpha_congruence_certificate(entry)
    assert cert["witness_ok"]
    assert cert["window_ok"]
    assert cert["alpha_ok"]
    assert congruent_to_one(entry.alpha, p, entry.nu)


def test_certificate_without_congruence():
    cert = alpha_congruence_certificate(theta_alpha(-6, 5, 20))
    assert cert["nu"] == 0 and cert["witness"] is None


def test_unknown_theta_alpha_row():
    with pytest.raises(InvalidArgumentError):
        theta_alpha(-10, 2, 10)


def test_export_theta_alpha(tmp_path):
    entry = theta_alpha(-4, 2, 12)
    paths = export_theta_alpha(entry, tmp_path)
    meta = json.loads(paths["meta"].read_text(encoding="utf-8"))
    assert meta == {"k": -4, "p": 2, "mu": 16, "nu": 4, "pole_order": 1}
    assert paths["theta"].read_text(encoding="utf-8").startswith("qseries val=-1 prec=12")
