"""
水平 1 的模形式：Bernoulli 数、E_k、Δ、j 以及典范基 f_{k,m}
"""
import functools
import threading
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Union

import sympy

from .exceptions import IntegralityError, InvalidArgumentError
from .models import CanonicalForm, WeightSplit
from .qseries import EtaQuotientSpec, QSeries, eta_quotient, invert

Number = Union[int, Fraction]


# ========== 级数缓存 ==========
def memoized_series(fn: Callable[..., QSeries]) -> Callable[..., QSeries]:
    """
    按参数缓存级数，只保留已请求过的最大精度；请求更低精度时截断返回。
    最后一个位置参数是精度。同一个函数的计算在锁内完成，每个精度只算一次。
    """
    cache: Dict[tuple, QSeries] = {}
    lock = threading.RLock()

    @functools.wraps(fn)
    def wrapper(*args):
        key, prec = args[:-1], args[-1]
        with lock:
            hit = cache.get(key)
            if hit is None or hit.prec < prec:
                target = prec if hit is None else max(prec, 2 * hit.prec)
                hit = fn(*key, target)
                cache[key] = hit
        return hit.truncate(prec)

    wrapper.cache_clear = cache.clear
    return wrapper


# ========== Bernoulli / Eisenstein ==========
def bernoulli(k: int) -> Fraction:
    """B_k（k 为非负偶数）"""
    if k < 0 or k % 2:
        raise InvalidArgumentError(f"bernoulli expects an even non-negative index, got {k}")
    b = sympy.bernoulli(k)
    return Fraction(int(b.p), int(b.q))


def eisenstein_constant(k: int) -> Fraction:
    """A_k = -2k / B_k"""
    return Fraction(-2 * k) / bernoulli(k)


def sigma(r: int, n: int) -> List[int]:
    """σ_r(0..n-1)，约定 σ_r(0) = 0"""
    out = [0] * n
    for d in range(1, n):
        dr = d ** r
        for multiple in range(d, n, d):
            out[multiple] += dr
    return out


@memoized_series
def eisenstein(k: int, prec: int) -> QSeries:
    """
    E_k 至 O(q^prec)。E_0 = 1；E_2 = 1 - 24 Σ σ_1(n) q^n（非模形式）。
    """
    if k < 0 or k % 2:
        raise InvalidArgumentError(f"Eisenstein series needs an even weight >= 0, got {k}")
    if prec < 1:
        raise InvalidArgumentError(f"prec must be at least 1, got {prec}")
    if k == 0:
        return QSeries.one(prec)
    a = eisenstein_constant(k)
    sig = sigma(k - 1, prec)
    coeffs = [Fraction(1)] + [a * s for s in sig[1:]]
    return QSeries(0, coeffs, prec)


@memoized_series
def delta(prec: int) -> QSeries:
    """Δ = q Π (1 - q^n)^24"""
    if prec < 2:
        raise InvalidArgumentError(f"delta needs prec >= 2, got {prec}")
    return eta_quotient(EtaQuotientSpec(((1, 24),)), prec)


@memoized_series
def jfunc(prec: int) -> QSeries:
    """j = E_4^3 / Δ = q^{-1} + 744 + 196884 q + ..."""
    if prec < 2:
        raise InvalidArgumentError(f"jfunc needs prec >= 2, got {prec}")
    n = prec + 1
    e4 = eisenstein(4, n)
    return e4 * e4 * e4 * invert(delta(n + 1), n)


def delta_power(ell: int, prec: int) -> QSeries:
    """Δ^ell（ell 可为负）至 O(q^prec)"""
    if ell == 0:
        return QSeries.one(prec)
    return eta_quotient(EtaQuotientSpec(((1, 24 * ell),)), prec)


# ========== 典范基 ==========
def weight_split(k: int) -> WeightSplit:
    """k = 12·ell + k'，k' ∈ {0,4,6,8,10,14}"""
    if k % 2:
        raise InvalidArgumentError(f"Weight must be even, got {k}")
    ell = k // 12
    kprime = k - 12 * ell
    if kprime == 2:
        ell -= 1
        kprime = 14
    return WeightSplit(k=k, ell=ell, kprime=kprime)


class CanonicalBasis:
    """
    单一权 k 的典范基阶梯 f_{k,-ell}, f_{k,-ell+1}, ...

    f_{k,i} 保存到 O(q^{height - i})：由 f_{k,i-1}·j 得到 f_{k,i} 恰好损失一位精度，
    而 j 始终只需 O(q^{height-1})。
    """

    def __init__(self, k: int):
        self.split = weight_split(k)
        self.k = k
        self.ell = self.split.ell
        self.height = 0
        self._forms: List[QSeries] = []     # _forms[i + ell] 即 f_{k,i}
        self._lock = threading.RLock()

    @property
    def top(self) -> int:
        return len(self._forms) - self.ell - 1

    def _seed(self) -> QSeries:
        # f_{k,-ell} = Δ^ell E_{k'}
        prec = self.height + self.ell
        rel = prec - self.ell
        return delta_power(self.ell, prec) * eisenstein(self.split.kprime, rel)

    def _next(self) -> QSeries:
        i = self.top + 1
        prec = self.height - i
        form = self._forms[-1] * jfunc(self.height - 1)
        form = form.truncate(prec)
        for t in range(-(i - 1), self.ell + 1):
            c = form.coeff(t)
            if c == 0:
                continue
            if c.denominator != 1:
                raise IntegralityError(f"Non-integral multiplier {c} while clearing q^{t} of f_{{{self.k},{i}}}")
            form = form - self._forms[-t + self.ell] * c
        return form.truncate(prec)

    def _rebuild(self, height: int, top: int):
        self.height = height
        self._forms = [self._seed()]
        while self.top < top:
            self._forms.append(self._next())

    def series(self, m: int, prec: int) -> QSeries:
        if m < -self.ell:
            raise InvalidArgumentError(f"No canonical form f_{{{self.k},{m}}}: index must be >= {-self.ell}")
        if prec <= self.ell + 1:
            raise InvalidArgumentError(f"prec must exceed ell + 1 = {self.ell + 1}, got {prec}")
        with self._lock:
            need = prec + m
            if self.height < need:
                self._rebuild(max(need, 2 * self.height), max(m, self.top))
            while self.top < m:
                self._forms.append(self._next())
            return self._forms[m + self.ell].truncate(prec)


_bases: Dict[int, CanonicalBasis] = {}
_bases_lock = threading.Lock()


def canonical_basis(k: int) -> CanonicalBasis:
    with _bases_lock:
        basis = _bases.get(k)
        if basis is None:
            basis = _bases[k] = CanonicalBasis(k)
        return basis


def canonical_form(k: int, m: int, prec: int) -> CanonicalForm:
    """f_{k,m} = q^{-m} + O(q^{ell+1}) 至 O(q^prec)"""
    basis = canonical_basis(k)
    return CanonicalForm(k=k, m=m, series=basis.series(m, prec), ell=basis.ell)


def _as_int(x: Number) -> Optional[int]:
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else None
    return int(x)


def a_coeff(k: int, m: Number, n: Number) -> int:
    """
    a_k(m, n)：f_{k,m} 中 q^n 的系数。
    m、n 不是整数、m < -ell 或 n <= ell 时为 0。
    """
    m_int, n_int = _as_int(m), _as_int(n)
    if m_int is None or n_int is None:
        return 0
    ell = weight_split(k).ell
    if m_int < -ell or n_int <= ell:
        return 0
    prec = max(ell + 2, n_int + 1)
    return canonical_form(k, m_int, prec).coefficient(n_int)


def clear_caches():
    """清空所有级数与典范基缓存（测试用）"""
    for fn in (eisenstein, delta, jfunc):
        fn.cache_clear()
    with _bases_lock:
        _bases.clear()
