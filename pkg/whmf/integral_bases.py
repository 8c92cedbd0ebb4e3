"""
M_k(p) 的维数与整基 B_{n,k,p} = q^n + O(q^d)，以及有限窗口同余判定
"""
import json
import threading
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .constants import DEFAULT_BASIS_GUARD
from .exceptions import (CertificateError, DecompositionError, IntegralityError,
                         InvalidArgumentError, PrecisionError)
from .level_p import _psi_series, _s_series, _weight2_series
from .models import IntegralBasis, LevelPForm
from .qseries import EtaQuotientSpec, QSeries, eta_quotient, series_product, to_text, vp

BASIS_PRIMES = (2, 3, 5)


def dim_mk(k: int, p: int) -> int:
    """dim M_k(p)，k 为非负偶数"""
    if k < 0 or k % 2:
        raise InvalidArgumentError(f"Weight must be even and non-negative, got {k}")
    if p == 2:
        return k // 4 + 1
    if p == 3:
        return k // 3 + 1
    if p == 5:
        return 2 * (k // 4) + 1
    raise InvalidArgumentError(f"Unsupported level {p}", hint=f"choose one of {BASIS_PRIMES}")


def _eta_block(spec: EtaQuotientSpec):
    return lambda prec: eta_quotient(spec, prec)


def _seed_factors(k: int, p: int) -> List[Tuple]:
    """权阶梯：返回 series_product 的因子列表，乘积 = q^{d-1} + O(q^d)"""
    w2 = (lambda prec: _weight2_series(p, prec), 0)
    if p == 2:
        # (1 或 2E_2(2τ)-E_2(τ)) · S_{4,2}^{⌊k/4⌋}
        factors = [(lambda prec: _s_series(4, 2, prec), 1, k // 4)]
        if k % 4:
            factors.append((w2[0], w2[1], 1))
        return factors
    if p == 3:
        # (1, W2 或 S_{4,3}) · (η^18(3τ)/η^6(τ))^{⌊k/6⌋}
        factors = [(_eta_block(EtaQuotientSpec(((3, 18), (1, -6)))), 2, k // 6)]
        rest = k % 6
        if rest == 2:
            factors.append((w2[0], w2[1], 1))
        elif rest == 4:
            factors.append((lambda prec: _s_series(4, 3, prec), 1, 1))
        return factors
    if p == 5:
        # (1 或 W2) · (η^10(5τ)/η^2(τ))^{⌊k/4⌋}
        factors = [(_eta_block(EtaQuotientSpec(((5, 10), (1, -2)))), 2, k // 4)]
        if k % 4:
            factors.append((w2[0], w2[1], 1))
        return factors
    raise InvalidArgumentError(f"Unsupported level {p}", hint=f"choose one of {BASIS_PRIMES}")


def seed_form(k: int, p: int, prec: int) -> QSeries:
    """M_k(p) 中在 ∞ 处消失到 d-1 阶的整系数形式（首项系数 1）"""
    d = dim_mk(k, p)
    seed = series_product(_seed_factors(k, p), prec)
    if seed.normalized().val != d - 1:
        raise CertificateError(f"Seed form for weight {k}, level {p} vanishes to order "
                               f"{seed.normalized().val}, expected {d - 1}")
    return seed


def _reduce(form: QSeries, later: List[QSeries], lo: int, d: int, k: int, p: int) -> QSeries:
    # later[t - lo] = B_t，t = lo..d-1
    for t in range(lo, d):
        c = form.coeff(t)
        if c == 0:
            continue
        if c.denominator != 1:
            raise IntegralityError(f"Non-integral multiplier {c} at q^{t} in the weight {k}, level {p} basis")
        form = form - later[t - lo] * c
    return form


_bases: Dict[Tuple[int, int], IntegralBasis] = {}
_bases_lock = threading.RLock()


def _build_basis(k: int, p: int, prec: int) -> IntegralBasis:
    d = dim_mk(k, p)
    # B_n 保存到 O(q^{prec+n})：ψ 的乘法每次损失一位
    elements: List[QSeries] = [seed_form(k, p, prec + d - 1)]
    for n in range(d - 2, -1, -1):
        form = elements[0] * _psi_series(p, prec - 1)
        if form.valuation() != n or form.coeff(n) != 1:
            raise CertificateError(f"psi-descent left q^{n} with coefficient {form.coeff(n)}")
        form = _reduce(form, elements, n + 1, d, k, p)
        elements.insert(0, form)
    elements = [e.truncate(prec).with_val(0) if e.val > 0 else e.truncate(prec) for e in elements]
    for n, e in enumerate(elements):
        for t in range(d):
            if e.coeff(t) != (1 if t == n else 0):
                raise CertificateError(f"B_{n} of weight {k}, level {p} is not in echelon form at q^{t}")
        if not e.is_integral():
            raise IntegralityError(f"B_{n} of weight {k}, level {p} has non-integral coefficients")
    return IntegralBasis(k=k, p=p, d=d, elements=elements)


def integral_basis(k: int, p: int, prec: Optional[int] = None, guard: int = DEFAULT_BASIS_GUARD) -> IntegralBasis:
    """
    B_{0..d-1}：先由权阶梯构造 B_{d-1}，再乘 ψ 下降并消去更高的项。
    prec 默认为 d + guard。
    """
    d = dim_mk(k, p)
    if prec is None:
        prec = d + guard
    if prec < d:
        raise PrecisionError(f"Integral basis of dimension {d} needs prec >= {d}, got {prec}")
    with _bases_lock:
        hit = _bases.get((k, p))
        if hit is None or hit.elements[0].prec < prec:
            hit = _bases[(k, p)] = _build_basis(k, p, prec)
    return IntegralBasis(k=k, p=p, d=d, elements=[e.truncate(prec) for e in hit.elements])


def basis_coordinates(f: QSeries, basis: IntegralBasis) -> List[int]:
    """f = Σ a_n B_n 的整系数坐标 a_0..a_{d-1}，并在公共精度上核对"""
    coords = []
    for n in range(basis.d):
        c = f.coeff(n)
        if c.denominator != 1:
            raise IntegralityError(f"Coordinate a_{n} = {c} is not an integer")
        coords.append(c.numerator)
    recon = QSeries.zero(min(f.prec, basis.elements[0].prec), val=0)
    for a, b in zip(coords, basis.elements):
        recon = recon + b * a
    if not recon.agrees_with(f):
        raise DecompositionError(f"Form is not in the span of the weight {basis.k}, level {basis.p} basis")
    return coords


def congruence_by_window(f: LevelPForm, s: int, p: int) -> bool:
    """
    前 d 个系数都被 p^s 整除时返回 True（此时 f ≡ 0 mod p^s），
    并对窗口外可用的全部系数抽查该结论。
    """
    series = f.series
    d = dim_mk(f.weight, p)
    if series.prec < d:
        raise PrecisionError(f"Need the first {d} coefficients, series is known to O(q^{series.prec})")
    if series.valuation() < 0:
        raise InvalidArgumentError("congruence_by_window expects a holomorphic form")
    if not series.is_integral():
        raise IntegralityError("congruence_by_window expects integral coefficients")
    if s <= 0:
        return True
    if any(vp(series.coeff(n), p) < s for n in range(d)):
        return False
    bad = [n for n in range(d, series.prec) if vp(series.coeff(n), p) < s]
    if bad:
        raise CertificateError(f"First {d} coefficients vanish mod {p}^{s} but q^{bad[0]} does not")
    return True


def export_basis(basis: IntegralBasis, out_dir: Path) -> List[Path]:
    """每个元素一个序列化文件 + JSON 清单 {k, p, d}"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for n, e in enumerate(basis.elements):
        path = out_dir / f"B_{n}_{basis.k}_{basis.p}.qs"
        path.write_text(to_text(e), encoding="utf-8")
        paths.append(path)
    meta = {"k": basis.k, "p": basis.p, "d": basis.d, "prec": basis.elements[0].prec if basis.elements else 0,
            "elements": [path.name for path in paths]}
    meta_path = out_dir / f"basis_{basis.k}_{basis.p}.json"
    meta_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    paths.append(meta_path)
    return paths


def clear_caches():
    with _bases_lock:
        _bases.clear()
