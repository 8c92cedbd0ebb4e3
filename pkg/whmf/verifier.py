"""
证书引擎：系数递推、测试形式、三角分解 Σ B_i Φ^i α、p 进证书、
有限测试集上的整体验证，以及对主定理的有限扫描
"""
import math
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import pandas as pd

from .config import WhmfConfig
from .constants import DEFAULT_DECOMPOSE_MIN_CHECK
from .exceptions import DecompositionError, InvalidArgumentError, PrecisionError
from .integral_bases import dim_mk
from .level_one import a_coeff, canonical_form
from .level_p import _phi_series, _psi_series, fricke_Up_image, lam, theta_alpha
from .logger import DualLogger
from .models import (Decomposition, JTestResult, LogLevel, ScanViolation,
                     VerificationReport)
from .qseries import QSeries, apply_Up, apply_Vp, min_vp, vp
from .tables import check_pair, epsilon, theta_alpha_row

Number = Union[int, Fraction]

EISENSTEIN_EXCLUSION = {
    "rule": "pairs (m, n) with v_p(m) == v_p(n) are skipped",
    "reason": "no divisibility is predicted there; the Eisenstein-type terms need not vanish mod p",
}


# ========== 系数递推 ==========
def recurrence_check(p: int, k: int, m: int, n: int, s: int) -> bool:
    """
    a_k(m, n p^s) = p^{s(k-1)} (a_k(m p^s, n) - a_k(m p^{s-1}, n/p)) + a_k(m/p, n p^{s-1})
    """
    if m <= 0 or n <= 0 or s <= 0:
        raise InvalidArgumentError(f"recurrence_check needs m, n, s > 0, got ({m}, {n}, {s})")
    lhs = a_coeff(k, m, n * p ** s)
    rhs = (Fraction(p) ** (s * (k - 1)) * (a_coeff(k, m * p ** s, n) - a_coeff(k, m * p ** (s - 1), Fraction(n, p)))
           + a_coeff(k, Fraction(m, p), n * p ** (s - 1)))
    return lhs == rhs


def reduction_chain_check(p: int, k: int, m: int, n: int, r: int, s: int) -> bool:
    """
    对所有 0 ≤ t ≤ min(r, s-1)：
    a_k(m p^r, n p^s) = a_k(m p^{r-t-1}, n p^{s-t-1}) + Σ_{j=0}^{t} p^{(s-j)(k-1)} a_k(m p^{r+s-2j}, n)
    """
    if math.gcd(m, p) != 1 or math.gcd(n, p) != 1:
        raise InvalidArgumentError(f"reduction_chain_check needs p ∤ m and p ∤ n, got m={m}, n={n}, p={p}")
    lhs = a_coeff(k, m * p ** r, n * p ** s)
    for t in range(0, min(r, s - 1) + 1):
        rhs = a_coeff(k, Fraction(m * p ** r, p ** (t + 1)), Fraction(n * p ** s, p ** (t + 1)))
        for j in range(t + 1):
            rhs += p ** ((s - j) * (k - 1)) * a_coeff(k, m * p ** (r + s - 2 * j), n)
        if lhs != rhs:
            return False
    return True


def g_form(p: int, k: int, m: int, s: int, prec: int) -> QSeries:
    """g = f_{k, m p^s} - f_{k, m p^{s-1}}(pτ)"""
    if s <= 0:
        raise InvalidArgumentError(f"g_form needs s > 0, got {s}")
    top = canonical_form(k, m * p ** s, prec).series
    low = canonical_form(k, m * p ** (s - 1), -(-prec // p)).series
    return top - apply_Vp(low, p).truncate(prec)


# ========== 元数据 ==========
def eisenstein_exclusion_note() -> Dict[str, str]:
    return dict(EISENSTEIN_EXCLUSION)


def is_excluded(p: int, m: int, n: int) -> bool:
    return vp(m, p) == vp(n, p)


def single_coefficient_margin(p: int, k: int) -> Tuple[int, bool]:
    """v_p(μ_{2-k,p}) + 1 - k + λ/2 - ε，以及单系数捷径是否适用"""
    row = theta_alpha_row(2 - k, p)
    margin = vp(row["mu"], p) + 1 - k + lam(p) // 2 - epsilon(k, p)
    return margin, margin >= 0


def lambda_exceeds_epsilon(p: int, k: int) -> bool:
    return Fraction(lam(p), 2) > epsilon(k, p)


# ========== 测试形式与另一尖点 ==========
def _check_j(p: int, k: int, j: int) -> int:
    check_pair(p, k)
    d = dim_mk(k, p)
    if not 1 <= j <= d - 1:
        raise InvalidArgumentError(f"j must lie in 1..{d - 1} for (p, k) = ({p}, {k}), got {j}")
    return d


def build_test_form(p: int, k: int, j: int, prec: int) -> QSeries:
    """f_{2-k,j}|U_p，若 p | j 再减去 f_{2-k,j/p}；至 O(q^prec)"""
    _check_j(p, k, j)
    w = 2 - k
    source = canonical_form(w, j, p * prec).series
    form = apply_Up(source, p).truncate(prec)
    if j % p == 0:
        form = form - canonical_form(w, j // p, prec).series
    return form


def zero_cusp_expansion(p: int, k: int, j: int, prec: int) -> QSeries:
    """测试形式在尖点 0 处的展开 p(pτ)^{k-2} f(-1/pτ)，至 O(q^prec)"""
    _check_j(p, k, j)
    w = 2 - k
    source = canonical_form(w, j, max(prec, 1)).series
    image = fricke_Up_image(source, w, p, prec)
    if j % p == 0:
        low = canonical_form(w, j // p, max(-(-prec // p), 1)).series
        image = image - apply_Vp(low, p).truncate(prec) * p
    return image


def decomposition_length(p: int, k: int, j: int) -> int:
    """N = j p^2 - θ_{2-k,p} 在 ∞ 处的极点阶"""
    _check_j(p, k, j)
    return j * p * p - int(theta_alpha_row(2 - k, p)["pole_order"])


# ========== Φ^i α 的缓存 ==========
class _PowerTable:
    """同一 (p, w) 的 Φ^i·α（或 ψ^i·θ）序列，按需延长、精度不足时重建"""

    def __init__(self, base, step):
        self._base = base      # prec -> 起始级数
        self._step = step      # prec -> 每步乘的级数
        self.rel = 0
        self.items: List[QSeries] = []
        self.lock = threading.RLock()

    def get(self, count: int, rel: int) -> List[QSeries]:
        with self.lock:
            if rel > self.rel:
                self.rel = max(rel, self.rel)
                self.items = []
            if len(self.items) < count:
                if not self.items:
                    self.items = [self._base(self.rel)]
                step = self._step(self.rel)
                while len(self.items) < count:
                    self.items.append(self.items[-1] * step)
            return [s.truncate(s.val + rel) for s in self.items[:count]]


_tables: Dict[Tuple[str, int, int], _PowerTable] = {}
_tables_lock = threading.Lock()


def _power_table(kind: str, p: int, w: int) -> _PowerTable:
    key = (kind, p, w)
    with _tables_lock:
        table = _tables.get(key)
        if table is None:
            if kind == "alpha":
                table = _PowerTable(lambda rel: theta_alpha(w, p, rel).alpha,
                                    lambda rel: _phi_series(p, rel + 1))
            else:
                def theta_base(rel, w=w, p=p):
                    entry = theta_alpha(w, p, rel - int(theta_alpha_row(w, p)["pole_order"]))
                    return entry.theta
                table = _PowerTable(theta_base, lambda rel: _psi_series(p, rel - 1))
            _tables[key] = table
        return table


def phi_alpha_powers(p: int, k: int, count: int, rel: int) -> List[QSeries]:
    """[Φ^i α_{2-k,p}]_{i<count}，每项相对精度 rel"""
    return _power_table("alpha", p, 2 - k).get(count, rel)


def psi_theta_powers(p: int, k: int, count: int, rel: int) -> List[QSeries]:
    """[ψ^i θ_{2-k,p}]_{i<count}，每项相对精度 rel"""
    return _power_table("theta", p, 2 - k).get(count, rel)


def clear_caches():
    """清空 Φ^i α / ψ^i θ 幂表（测试用）"""
    with _tables_lock:
        _tables.clear()


# ========== 三角分解 ==========
def _triangular_solve(f: QSeries, basis: Sequence[QSeries], exponents: Sequence[int],
                      upto: int) -> Tuple[List[Fraction], QSeries]:
    """依次用 basis[i]（首项 q^{exponents[i]}，系数 1）消去 f 中该指数的系数"""
    residual = f.truncate(upto)
    out = []
    for series, e in zip(basis, exponents):
        c = residual.coeff(e)
        out.append(c)
        if c:
            residual = residual - series * c
    return out, residual


def decompose(f: QSeries, k: int, p: int, prec: int, N: Optional[int] = None,
              target: str = "", min_check: int = DEFAULT_DECOMPOSE_MIN_CHECK) -> Decomposition:
    """
    f = Σ_{i=0}^{N} B_i Φ^i α_{2-k,p}：Φ^i α = q^i + ...，从 q^0 起逐个确定 B_i，
    剩余部分须在 O(q^prec) 之下为零，且 q^{N+1} 之后至少核对 min_check 个系数。
    N 缺省时在窗口内全部求解后去掉末尾的零。
    """
    check_pair(p, k)
    if f.valuation() < 0:
        raise DecompositionError("Decomposition target has a pole at infinity")
    if f.prec < prec:
        raise PrecisionError(f"Target known to O(q^{f.prec}), decomposition needs O(q^{prec})")
    trim = N is None
    if trim:
        N = prec - 1 - min_check
    if N < 0 or prec - (N + 1) < min_check:
        raise PrecisionError(f"Decomposition length {N} leaves fewer than {min_check} checked "
                             f"coefficients below O(q^{prec})", hint="raise prec or the verification margin")
    powers = phi_alpha_powers(p, k, N + 1, prec)
    B, residual = _triangular_solve(f, powers, range(N + 1), prec)
    remainder_ok = residual.is_zero()
    if not remainder_ok:
        raise DecompositionError(f"Remainder after {N + 1} terms starts at q^{residual.valuation()}",
                                 hint="N too small or the target is not of the assumed shape")
    if trim:
        while len(B) > 1 and B[-1] == 0:
            B.pop()
        N = len(B) - 1
    return Decomposition(p=p, k=k, target=target, B=B, N=N,
                         valuations=[vp(b, p) for b in B], remainder_ok=remainder_ok, prec=prec)


def reconstruct(B: Sequence[Number], k: int, p: int, prec: int) -> QSeries:
    """Σ B_i Φ^i α_{2-k,p} 至 O(q^prec)"""
    result = QSeries.zero(prec, val=0)
    for b, series in zip(B, phi_alpha_powers(p, k, len(B), prec)):
        if b:
            result = result + series.truncate(prec) * Fraction(b)
    return result


def fricke_coefficients(F: QSeries, p: int, k: int, N: int, window: int) -> Tuple[List[Fraction], bool]:
    """
    F = Σ_{i=0}^{N} C_i ψ^i θ_{2-k,p}，从最低次项 q^{-N-P} 开始求解；
    返回 C_i 以及剩余部分在 O(q^{-P+window}) 之下是否为零。
    """
    pole = int(theta_alpha_row(2 - k, p)["pole_order"])
    upto = -pole + window
    rel = upto + pole + N
    powers = psi_theta_powers(p, k, N + 1, rel)
    order = list(range(N, -1, -1))
    C_rev, residual = _triangular_solve(F, [powers[i] for i in order], [-i - pole for i in order], upto)
    return list(reversed(C_rev)), residual.is_zero()


def certify_constant_congruence(dec: Decomposition, eps: int, nu: int,
                                K_expected: Optional[Number] = None) -> bool:
    """v_p(B_i) ≥ ε (i > 0)，v_p(B_0) ≥ ε - ν，且 B_0 = K（给定时）"""
    if not dec.B:
        return False
    p = dec.p
    if any(vp(b, p) < eps for b in dec.B[1:]):
        return False
    if vp(dec.B[0], p) < eps - nu:
        return False
    if K_expected is not None and Fraction(dec.B[0]) != Fraction(K_expected):
        return False
    return True


# ========== 整体验证 ==========
class Verifier:
    """(p, k) 的有限测试集验证"""

    def __init__(self, config: Optional[WhmfConfig] = None, logger: Optional[DualLogger] = None):
        self.config = config or WhmfConfig()
        self.logger = logger

    def _log(self, event: str, level: LogLevel = LogLevel.INFO, **kwargs):
        if self.logger is not None:
            self.logger.log(event, level, **kwargs)

    def working_prec(self, p: int, k: int, j: int) -> int:
        d = dim_mk(k, p)
        N = decomposition_length(p, k, j)
        margin = max(self.config.verify_margin, self.config.decompose_min_check)
        return max(self.config.verify_prec_floor, N + d + margin)

    def test_one(self, p: int, k: int, j: int, prec: Optional[int] = None) -> Tuple[JTestResult, Decomposition]:
        cfg = self.config
        eps = epsilon(k, p)
        row = theta_alpha_row(2 - k, p)
        nu = int(row["nu"])
        N = decomposition_length(p, k, j)
        prec = self.working_prec(p, k, j) if prec is None else prec

        target = f"f_{{{2 - k},{j}}}|U_{p}" + (f" - f_{{{2 - k},{j // p}}}" if j % p == 0 else "")
        form = build_test_form(p, k, j, prec)
        dec = decompose(form, k, p, prec, N=N, target=target, min_check=cfg.decompose_min_check)
        self._log("decompose.done", LogLevel.DEBUG, p=p, k=k, j=j, metrics={"N": N, "prec": prec})
        divides = certify_constant_congruence(dec, eps, nu)
        result = JTestResult(
            j=j, target=target, constant=dec.B[0], N=N,
            min_vp_Bi_igt0=min_vp(dec.B[1:], p),
            vp_B0=vp(dec.B[0], p),
            divides=divides, prec=prec,
        )
        if cfg.direct_scan:
            result.direct_scan_ok = all(vp(form.coeff(n), p) >= eps for n in range(1, form.prec))
        if cfg.fricke_cross_check:
            result.fricke_consistent = self.fricke_cross_check(p, k, j, dec)
        self._log("verify.test", p=p, k=k, j=j, metrics={
            "N": N, "prec": prec, "constant": dec.B[0], "min_vp_Bi_igt0": result.min_vp_Bi_igt0,
            "vp_B0": result.vp_B0, "divides": divides, "direct_scan_ok": result.direct_scan_ok,
            "fricke_consistent": result.fricke_consistent,
        })
        return result, dec

    def fricke_cross_check(self, p: int, k: int, j: int, dec: Decomposition) -> bool:
        """由尖点 0 处的展开求 C_i，核对 B_i = C_i·μ·p^{iλ/2 - 1}"""
        row = theta_alpha_row(2 - k, p)
        mu = int(row["mu"])
        pole = int(row["pole_order"])
        window = max(self.config.fricke_window, 1)
        F = zero_cusp_expansion(p, k, j, -pole + window)
        C, clean = fricke_coefficients(F, p, k, dec.N, window)
        half = Fraction(lam(p), 2)
        for i, (b, c) in enumerate(zip(dec.B, C)):
            exponent = i * half - 1
            if exponent.denominator != 1:
                return False
            if b != c * mu * Fraction(p) ** int(exponent):
                return False
        return clean

    def verify(self, p: int, k: int, prec: Optional[int] = None) -> VerificationReport:
        check_pair(p, k)
        t0 = time.perf_counter()
        d = dim_mk(k, p)
        eps = epsilon(k, p)
        nu = int(theta_alpha_row(2 - k, p)["nu"])
        _, single = single_coefficient_margin(p, k)
        self._log("verify.start", p=p, k=k, metrics={"d": d, "epsilon": eps, "nu": nu})

        report = VerificationReport(p=p, k=k, d=d, epsilon=eps, nu=nu, single_coefficient_applies=single)
        if d > 1:
            # 按最大的 j 一次性备好 Φ^i α 与 ψ^i θ
            n_max = decomposition_length(p, k, d - 1)
            prec_max = self.working_prec(p, k, d - 1) if prec is None else prec
            phi_alpha_powers(p, k, n_max + 1, prec_max)
            if self.config.fricke_cross_check:
                psi_theta_powers(p, k, n_max + 1, max(self.config.fricke_window, 1) + n_max)
        for j in range(1, d):
            result, _ = self.test_one(p, k, j, prec)
            report.tests.append(result)
            report.prec = max(report.prec, result.prec)

        report.passed = all(t.divides and t.direct_scan_ok is not False and t.fricke_consistent is not False
                            for t in report.tests)
        report.elapsed_ms = int((time.perf_counter() - t0) * 1000)
        self._log("verify.done", LogLevel.INFO if report.passed else LogLevel.ERROR, p=p, k=k,
                  metrics={"pass": report.passed, "tests": len(report.tests), "elapsed_ms": report.elapsed_ms})
        return report

    def scan_table(self, p: int, k: int, m_range, n_range, s_max: int = 0) -> pd.DataFrame:
        """
        主定理在有限区域上的逐项核对。s_max > 0 时额外加入 (m p^s, n)，1 ≤ s ≤ s_max。
        v_p(m) = v_p(n) 的项跳过。
        """
        check_pair(p, k)
        eps = epsilon(k, p)
        ms = _as_range(m_range)
        ns = _as_range(n_range)
        pairs = []
        seen = set()
        for m in ms:
            for s in range(0, s_max + 1):
                for n in ns:
                    key = (m * p ** s, n)
                    if key not in seen:
                        seen.add(key)
                        pairs.append(key)

        rows = []
        for m, n in pairs:
            if is_excluded(p, m, n):
                continue
            vm, vn = vp(m, p), vp(n, p)
            bound = eps if vm > vn else (vn - vm) * (k - 1) + eps
            value = a_coeff(k, m, n)
            v = vp(value, p)
            rows.append({"m": m, "n": n, "vp_m": vm, "vp_n": vn, "bound": bound,
                         "vp": None if v == math.inf else v, "ok": v >= bound})
        df = pd.DataFrame(rows, columns=["m", "n", "vp_m", "vp_n", "bound", "vp", "ok"])
        self._log("scan.done", p=p, k=k, metrics={
            "m": [min(ms), max(ms)] if ms else [], "n": [min(ns), max(ns)] if ns else [], "s_max": s_max,
            "checked": len(df), "violations": int((~df["ok"]).sum()) if len(df) else 0})
        return df


def _as_range(r) -> List[int]:
    if isinstance(r, int):
        return list(range(1, r + 1))
    return list(r)


_default = Verifier()


def verify_theorem5(p: int, k: int, prec: Optional[int] = None,
                    config: Optional[WhmfConfig] = None, logger: Optional[DualLogger] = None) -> VerificationReport:
    """对 j = 1..d-1 逐个构造测试形式、分解、给出证书"""
    verifier = _default if config is None and logger is None else Verifier(config, logger)
    return verifier.verify(p, k, prec)


def _verify_pair(args):
    p, k, prec, config = args
    return verify_theorem5(p, k, prec, config)


def verify_all(pairs: Iterable[Tuple[int, int]], config: Optional[WhmfConfig] = None,
               prec: Optional[int] = None, logger: Optional[DualLogger] = None) -> List[VerificationReport]:
    """多个 (p, k) 的验证；workers > 1 时用进程池"""
    config = config or WhmfConfig()
    pairs = list(pairs)
    if config.workers > 1 and len(pairs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            reports = list(pool.map(_verify_pair, [(p, k, prec, config) for p, k in pairs]))
        if logger is not None:
            for r in reports:
                logger.log("verify.done", p=r.p, k=r.k, metrics={"pass": r.passed, "elapsed_ms": r.elapsed_ms})
        return reports
    verifier = Verifier(config, logger)
    return [verifier.verify(p, k, prec) for p, k in pairs]


def scan_table(p: int, k: int, m_range, n_range, s_max: int = 0) -> pd.DataFrame:
    return _default.scan_table(p, k, m_range, n_range, s_max)


def scan_theorem1(p: int, k: int, m_range, n_range, s_max: int = 0) -> List[ScanViolation]:
    """返回违反 v_p(a_k(m,n)) 下界的 (m, n)；空列表表示通过"""
    df = scan_table(p, k, m_range, n_range, s_max)
    if df.empty:
        return []
    bad = df[~df["ok"]]
    return [ScanViolation(m=int(r.m), n=int(r.n), vp=math.inf if pd.isna(r.vp) else int(r.vp), bound=int(r.bound))
            for r in bad.itertuples()]
