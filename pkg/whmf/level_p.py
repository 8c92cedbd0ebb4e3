"""
水平 p 的对象：S_{k,p}、T_{k,p}、权 2 组合、五个新形式、Φ_p/ψ_p、θ/α 表、
Fricke 另一尖点处的展开以及 Hecke 算子 T_p
"""
import json
import threading
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple, Union

from .constants import SUPPORTED_PRIMES, SUPPORTED_WEIGHTS
from .exceptions import CertificateError, InvalidArgumentError, PrecisionError
from .level_one import eisenstein, eisenstein_constant, memoized_series
from .models import LevelPForm, NewformName, ThetaAlphaEntry
from .qseries import (EtaQuotientSpec, QSeries, apply_Up, apply_Vp, eta_quotient,
                      series_product, to_text, vp)
from .tables import congruence_witness, theta_alpha_row

# T_{k,p} 有整系数的 (k, p)
INTEGRAL_T = {(4, 2), (6, 2), (4, 3)}


def lam(p: int) -> int:
    """λ_p = 24/(p-1)，仅对 p ∈ {2, 3, 5}"""
    if p not in SUPPORTED_PRIMES:
        raise InvalidArgumentError(f"Phi/psi are defined here only for p in {SUPPORTED_PRIMES}, got {p}")
    return 24 // (p - 1)


def _at_p_tau(f: Callable[[int], QSeries], p: int, prec: int) -> QSeries:
    """g(pτ) 至 O(q^prec)，g 由 f(prec) 给出且 val ≥ 0"""
    return apply_Vp(f(-(-prec // p)), p).truncate(prec)


def _check_weight(k: int):
    if k not in SUPPORTED_WEIGHTS:
        raise InvalidArgumentError(f"S/T forms are built for k in {SUPPORTED_WEIGHTS}, got {k}")


# ========== S / T / 权 2 ==========
@memoized_series
def _s_series(k: int, p: int, prec: int) -> QSeries:
    ek = eisenstein(k, prec)
    return (ek - _at_p_tau(lambda n: eisenstein(k, n), p, prec)) / eisenstein_constant(k)


@memoized_series
def _t_series(k: int, p: int, prec: int) -> QSeries:
    pk = p ** k
    ek = eisenstein(k, prec)
    return (_at_p_tau(lambda n: eisenstein(k, n), p, prec) * pk - ek) / (pk - 1)


def s_form(k: int, p: int, prec: int) -> LevelPForm:
    """S_{k,p} = (E_k(τ) - E_k(pτ)) / A_k，在 ∞ 处消失"""
    _check_weight(k)
    return LevelPForm(weight=k, p=p, series=_s_series(k, p, prec), integral=True, name=f"S_{k},{p}")


def t_form(k: int, p: int, prec: int) -> LevelPForm:
    """T_{k,p} = (p^k E_k(pτ) - E_k(τ)) / (p^k - 1)，在 0 处消失"""
    _check_weight(k)
    return LevelPForm(weight=k, p=p, series=_t_series(k, p, prec),
                      integral=(k, p) in INTEGRAL_T, name=f"T_{k},{p}")


@memoized_series
def _weight2_series(p: int, prec: int) -> QSeries:
    e2 = eisenstein(2, prec)
    return (e2 - _at_p_tau(lambda n: eisenstein(2, n), p, prec) * p) / (1 - p)


def weight2_form(p: int, prec: int) -> LevelPForm:
    """(E_2(τ) - p E_2(pτ)) / (1 - p)：权 2、水平 p、常数项 1"""
    if p < 2:
        raise InvalidArgumentError(f"Level must be a prime, got {p}")
    return LevelPForm(weight=2, p=p, series=_weight2_series(p, prec),
                      integral=p in (2, 3, 5), name=f"W2_{p}")


def weight2_variant(p: int, prec: int) -> LevelPForm:
    """
    (p E_2(pτ) - E_2(τ)) / (p - 1)，即 2E_2(2τ)-E_2(τ)、(3E_2(3τ)-E_2(τ))/2、(5E_2(5τ)-E_2(τ))/4。
    与 weight2_form 是同一个形式，只换了名字。
    """
    form = weight2_form(p, prec)
    return LevelPForm(weight=2, p=p, series=form.series, integral=form.integral, name=f"W2'_{p}")


# ========== 新形式 ==========
_NEWFORM_LEVEL = {
    NewformName.Xi8: (8, 2), NewformName.Xi10: (10, 2), NewformName.Omega6: (6, 3),
    NewformName.Lambda4: (4, 5), NewformName.Lambda6: (6, 5),
}


@memoized_series
def _newform_series(name: NewformName, prec: int) -> QSeries:
    if name == NewformName.Xi8:
        return eta_quotient(EtaQuotientSpec(((1, 8), (2, 8))), prec)
    if name == NewformName.Omega6:
        return eta_quotient(EtaQuotientSpec(((1, 6), (3, 6))), prec)
    if name == NewformName.Lambda4:
        return eta_quotient(EtaQuotientSpec(((1, 4), (5, 4))), prec)
    if name == NewformName.Xi10:
        # S_{4,2}·T_{6,2}；_s_series 的窗口从 q^0 起，需先规范到 val 1
        return _s_series(4, 2, prec).normalized() * _t_series(6, 2, prec - 1)
    # Λ6 = (5E_2(5τ) - E_2(τ))/4 · Λ4
    return _weight2_series(5, prec - 1) * _newform_series(NewformName.Lambda4, prec)


def newform(name: Union[str, NewformName], prec: int) -> LevelPForm:
    """Ξ8, Ξ10（水平 2），Ω6（水平 3），Λ4, Λ6（水平 5）"""
    try:
        name = NewformName(name)
    except ValueError:
        raise InvalidArgumentError(f"Unknown newform {name!r}",
                                   hint=f"choose one of {[n.value for n in NewformName]}")
    weight, level = _NEWFORM_LEVEL[name]
    return LevelPForm(weight=weight, p=level, series=_newform_series(name, prec),
                      integral=True, name=name.value)


# ========== Φ / ψ ==========
@memoized_series
def _phi_series(p: int, prec: int) -> QSeries:
    n = lam(p)
    return eta_quotient(EtaQuotientSpec(((p, n), (1, -n))), prec)


@memoized_series
def _psi_series(p: int, prec: int) -> QSeries:
    n = lam(p)
    return eta_quotient(EtaQuotientSpec(((p, -n), (1, n))), prec)


def phi(p: int, prec: int) -> LevelPForm:
    """Φ_p = (η(pτ)/η(τ))^λ = q + ...，权 0、水平 p"""
    return LevelPForm(weight=0, p=p, series=_phi_series(p, prec), integral=True, name=f"Phi_{p}")


def psi(p: int, prec: int) -> LevelPForm:
    """ψ_p = 1/Φ_p = q^{-1} + ..."""
    return LevelPForm(weight=0, p=p, series=_psi_series(p, prec), integral=True, name=f"psi_{p}")


# ========== U_p / V_p / T_p ==========
def apply_Tp(f: Union[LevelPForm, QSeries], p: int, k: Optional[int] = None) -> Union[LevelPForm, QSeries]:
    """f|T_p = f|U_p + p^{k-1} f|V_p；传入 LevelPForm 时权取自 f.weight"""
    if isinstance(f, LevelPForm):
        image = apply_Tp(f.series, p, f.weight if k is None else k)
        return LevelPForm(f.weight, f.p, image, integral=f.integral and image.is_integral(), name=f.name)
    if k is None:
        raise InvalidArgumentError("apply_Tp on a bare QSeries needs the weight k")
    upart = apply_Up(f, p)
    vpart = apply_Vp(f, p) * Fraction(p) ** (k - 1)
    return upart + vpart


def fricke_Up_image(f: QSeries, k: int, p: int, prec: int) -> QSeries:
    """
    p(pτ)^{-k}(f|U_p)(-1/pτ) 在 ∞ 处的展开：-f + p·(f|U_p)|V_p + p^k·f|V_{p^2}，
    其中 f 为水平 1、权 k 的形式。
    """
    if f.prec < prec:
        raise PrecisionError(f"fricke_Up_image to O(q^{prec}) needs f known to O(q^{prec}), have O(q^{f.prec})")
    f = f.truncate(prec)
    image = -f + apply_Vp(apply_Up(f, p), p) * p + apply_Vp(f, p * p) * Fraction(p) ** k
    return image.truncate(prec)


def hecke_Vp_identity(f: QSeries, k: int, p: int) -> bool:
    """p·(f|U_p)|V_p + p^k f|V_{p^2} = p·((f|T_p)|V_p)"""
    lhs = apply_Vp(apply_Up(f, p), p) * p + apply_Vp(f, p * p) * Fraction(p) ** k
    rhs = apply_Vp(apply_Tp(f, p, k), p) * p
    return lhs.agrees_with(rhs)


# ========== θ / α ==========
def _delta_at(d: int) -> Tuple[Callable[[int], QSeries], int]:
    return (lambda prec: eta_quotient(EtaQuotientSpec(((d, 24),)), prec)), d


def blocks(p: int) -> Dict[str, Tuple[Callable[[int], QSeries], int]]:
    """配方构件：名称 -> (builder(prec), val)"""
    return {
        "Delta1": _delta_at(1),
        "Delta2": _delta_at(2),
        "Delta3": _delta_at(3),
        "Delta5": _delta_at(5),
        "Xi8": (lambda n: _newform_series(NewformName.Xi8, n), 1),
        "Xi10": (lambda n: _newform_series(NewformName.Xi10, n), 1),
        "Omega6": (lambda n: _newform_series(NewformName.Omega6, n), 1),
        "Lambda4": (lambda n: _newform_series(NewformName.Lambda4, n), 1),
        "Lambda6": (lambda n: _newform_series(NewformName.Lambda6, n), 1),
        "S4": (lambda n: _s_series(4, p, n), 1),
        "S6": (lambda n: _s_series(6, p, n), 1),
        "T4": (lambda n: _t_series(4, p, n), 0),
        "T6": (lambda n: _t_series(6, p, n), 0),
        "Phi": (lambda n: _phi_series(p, n), 1),
        "Psi": (lambda n: _psi_series(p, n), -1),
    }


def build_recipe(recipe: Dict[str, int], p: int, prec: int) -> QSeries:
    table = blocks(p)
    factors = []
    for name, e in recipe.items():
        if name not in table:
            raise InvalidArgumentError(f"Unknown recipe block {name!r}")
        builder, val = table[name]
        factors.append((builder, val, int(e)))
    return series_product(factors, prec)


_entries: Dict[Tuple[int, int], ThetaAlphaEntry] = {}
_entries_lock = threading.RLock()


def _build_entry(k: int, p: int, prec: int) -> ThetaAlphaEntry:
    row = theta_alpha_row(k, p)
    theta = build_recipe(row["theta"], p, prec).normalized()
    alpha = build_recipe(row["alpha"], p, prec)
    lead = theta.leading_coefficient()
    if lead != 1:
        theta = theta / lead
    pole = -theta.val
    if pole != row["pole_order"]:
        raise CertificateError(f"theta_{k},{p} has a pole of order {pole} at infinity, table says {row['pole_order']}")
    if alpha.valuation() != 0 or alpha.coeff(0) != 1:
        raise CertificateError(f"alpha_{k},{p} does not start with 1 + O(q)")
    return ThetaAlphaEntry(k=k, p=p, theta=theta, alpha=alpha, mu=int(row["mu"]), nu=int(row["nu"]),
                           pole_order_at_infty=pole)


def theta_alpha(k: int, p: int, prec: int) -> ThetaAlphaEntry:
    """表中 (k, p) 一行的 θ_{k,p}, α_{k,p}（均至 O(q^prec)）与 μ, ν"""
    theta_alpha_row(k, p)
    with _entries_lock:
        hit = _entries.get((k, p))
        if hit is None or hit.theta.prec < prec or hit.alpha.prec < prec:
            target = prec if hit is None else max(prec, 2 * hit.alpha.prec)
            hit = _entries[(k, p)] = _build_entry(k, p, target)
    return ThetaAlphaEntry(k=k, p=p, theta=hit.theta.truncate(prec), alpha=hit.alpha.truncate(prec),
                           mu=hit.mu, nu=hit.nu, pole_order_at_infty=hit.pole_order_at_infty)


def congruent_to_one(f: QSeries, p: int, r: int) -> bool:
    """f ≡ 1 (mod p^r) 逐系数（窗口内）"""
    if r <= 0:
        return True
    for n, c in f.items():
        target = c - 1 if n == 0 else c
        if target != 0 and vp(target, p) < r:
            return False
    if f.val > 0:
        return False
    return True


def _witness_series(k: int, p: int, prec: int) -> QSeries:
    name = congruence_witness(k)
    if name == "W2":
        return _weight2_series(p, prec)
    if name == "E4cubed":
        e4 = eisenstein(4, prec)
        return e4 * e4 * e4
    return eisenstein(int(name[1:]), prec)


def alpha_congruence_certificate(entry: ThetaAlphaEntry, prec: Optional[int] = None) -> Dict[str, object]:
    """
    α ≡ 1 (mod p^ν) 的假设核对：
    权 -k 的见证 F ≡ 1 (mod p^ν)，且 α - 1 的前 pole_order 个系数被 p^ν 整除。
    """
    prec = entry.alpha.prec if prec is None else prec
    p, nu = entry.p, entry.nu
    if nu == 0:
        return {"k": entry.k, "p": p, "nu": 0, "witness": None, "witness_ok": True, "window_ok": True,
                "alpha_ok": True}
    witness = _witness_series(entry.k, p, prec)
    window = entry.alpha.truncate(min(entry.alpha.prec, entry.pole_order_at_infty + 1))
    return {
        "k": entry.k, "p": p, "nu": nu,
        "witness": congruence_witness(entry.k),
        "witness_ok": congruent_to_one(witness, p, nu),
        "window_ok": congruent_to_one(window, p, nu),
        "alpha_ok": congruent_to_one(entry.alpha.truncate(min(prec, entry.alpha.prec)), p, nu),
    }


def export_theta_alpha(entry: ThetaAlphaEntry, out_dir: Path) -> Dict[str, Path]:
    """θ、α 的序列化文本 + JSON 附注 {k, p, mu, nu, pole_order}"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"theta_alpha_{-entry.k}_{entry.p}"
    paths = {
        "theta": out_dir / f"{stem}.theta.qs",
        "alpha": out_dir / f"{stem}.alpha.qs",
        "meta": out_dir / f"{stem}.json",
    }
    paths["theta"].write_text(to_text(entry.theta), encoding="utf-8")
    paths["alpha"].write_text(to_text(entry.alpha), encoding="utf-8")
    meta = {"k": entry.k, "p": entry.p, "mu": entry.mu, "nu": entry.nu,
            "pole_order": entry.pole_order_at_infty}
    paths["meta"].write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return paths


def clear_caches():
    for fn in (_s_series, _t_series, _weight2_series, _newform_series, _phi_series, _psi_series):
        fn.cache_clear()
    with _entries_lock:
        _entries.clear()
