"""
截断 Laurent q 级数的精确算术

QSeries 表示 Σ_{n=val}^{prec-1} c_n q^n + O(q^prec)，系数为精确有理数，
内部以整数分子列表 + 公分母（正整数，与全部分子互素）存储。
读取 n ≥ prec 的系数一律报错，不补零。
"""
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

from .constants import SERIES_HEADER, SPARSE_RATIO
from .exceptions import IntegralityError, InvalidArgumentError, PrecisionError
from .polymul import mul_truncated

Rational = Union[int, Fraction]

_HEADER_RE = re.compile(rf"^{SERIES_HEADER} val=(-?\d+) prec=(-?\d+)$")


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise InvalidArgumentError(f"Coefficient {x!r} is not an exact rational",
                               hint="float coefficients are not supported")


class QSeries:
    """截断 Laurent 级数（不可变）"""

    __slots__ = ("val", "prec", "_num", "_den")

    def __init__(self, val: int, coeffs: Sequence[Rational], prec: int):
        if prec - val != len(coeffs):
            raise InvalidArgumentError(
                f"Coefficient window has {len(coeffs)} entries but prec - val = {prec - val}")
        fracs = [_as_fraction(c) for c in coeffs]
        den = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
        self.val = val
        self.prec = prec
        self._num = [f.numerator * (den // f.denominator) for f in fracs]
        self._den = den

    # ---------- 内部构造 ----------
    @classmethod
    def _raw(cls, val: int, nums: List[int], den: int, prec: int) -> "QSeries":
        """直接由整数分子与分母构造，并约去公因子"""
        obj = cls.__new__(cls)
        if den < 0:
            nums = [-c for c in nums]
            den = -den
        if den != 1:
            g = math.gcd(den, *nums)
            if g > 1:
                nums = [c // g for c in nums]
                den //= g
        obj.val = val
        obj.prec = prec
        obj._num = nums
        obj._den = den
        return obj

    @classmethod
    def from_ints(cls, val: int, nums: Sequence[int], prec: int, den: int = 1) -> "QSeries":
        if prec - val != len(nums):
            raise InvalidArgumentError(
                f"Coefficient window has {len(nums)} entries but prec - val = {prec - val}")
        return cls._raw(val, list(nums), den, prec)

    @classmethod
    def zero(cls, prec: int, val: Optional[int] = None) -> "QSeries":
        val = prec - 1 if val is None else val
        return cls._raw(val, [0] * (prec - val), 1, prec)

    @classmethod
    def constant(cls, c: Rational, prec: int) -> "QSeries":
        """常数 c + O(q^prec)"""
        if prec <= 0:
            return cls.zero(prec, val=prec)
        c = _as_fraction(c)
        return cls._raw(0, [c.numerator] + [0] * (prec - 1), c.denominator, prec)

    @classmethod
    def one(cls, prec: int) -> "QSeries":
        return cls.constant(1, prec)

    @classmethod
    def monomial(cls, n: int, prec: int, c: Rational = 1) -> "QSeries":
        """c·q^n + O(q^prec)"""
        if prec <= n:
            raise InvalidArgumentError(f"Monomial q^{n} does not fit below prec {prec}")
        c = _as_fraction(c)
        return cls._raw(n, [c.numerator] + [0] * (prec - n - 1), c.denominator, prec)

    # ---------- 读取 ----------
    @property
    def rel_prec(self) -> int:
        return self.prec - self.val

    @property
    def denominator(self) -> int:
        return self._den

    @property
    def numerators(self) -> List[int]:
        return list(self._num)

    @property
    def coeffs(self) -> List[Fraction]:
        return [Fraction(c, self._den) for c in self._num]

    def coeff(self, n: int) -> Fraction:
        if n >= self.prec:
            raise PrecisionError(f"Coefficient of q^{n} requested but series is only known to O(q^{self.prec})")
        if n < self.val:
            return Fraction(0)
        return Fraction(self._num[n - self.val], self._den)

    __getitem__ = coeff

    def int_coeff(self, n: int) -> int:
        c = self.coeff(n)
        if c.denominator != 1:
            raise IntegralityError(f"Coefficient of q^{n} is {c}, not an integer")
        return c.numerator

    def is_integral(self) -> bool:
        return self._den == 1

    def int_coeffs(self) -> List[int]:
        if self._den != 1:
            raise IntegralityError(f"Series has common denominator {self._den}")
        return list(self._num)

    def is_zero(self) -> bool:
        return not any(self._num)

    def valuation(self) -> Union[int, float]:
        """真实赋值（首个非零系数的指数）；零级数返回 inf"""
        for i, c in enumerate(self._num):
            if c:
                return self.val + i
        return math.inf

    def leading_coefficient(self) -> Fraction:
        v = self.valuation()
        if v == math.inf:
            raise InvalidArgumentError("Zero series has no leading coefficient")
        return self.coeff(v)

    def items(self) -> Iterable[Tuple[int, Fraction]]:
        for i, c in enumerate(self._num):
            yield self.val + i, Fraction(c, self._den)

    # ---------- 结构变换 ----------
    def normalized(self) -> "QSeries":
        """去掉前导零，使 val 成为真实赋值；零级数原样返回"""
        v = self.valuation()
        if v == math.inf or v == self.val:
            return self
        cut = v - self.val
        return QSeries._raw(v, self._num[cut:], self._den, self.prec)

    def truncate(self, prec: int) -> "QSeries":
        if prec > self.prec:
            raise PrecisionError(f"Cannot extend O(q^{self.prec}) to O(q^{prec})")
        if prec <= self.val:
            return QSeries._raw(prec, [], 1, prec)
        return QSeries._raw(self.val, self._num[:prec - self.val], self._den, prec)

    def with_val(self, val: int) -> "QSeries":
        """把窗口下端延伸到 val（补显式零），val 不得高于当前 val"""
        if val > self.val:
            raise InvalidArgumentError(f"Cannot raise val from {self.val} to {val}")
        return QSeries._raw(val, [0] * (self.val - val) + self._num, self._den, self.prec)

    def shift(self, n: int) -> "QSeries":
        """乘以 q^n"""
        return QSeries._raw(self.val + n, list(self._num), self._den, self.prec + n)

    # ---------- 算术 ----------
    def _aligned(self, other: "QSeries") -> Tuple[int, int, int, List[int], List[int]]:
        val = min(self.val, other.val)
        prec = min(self.prec, other.prec)
        den = math.lcm(self._den, other._den)
        out = []
        for s in (self, other):
            f = den // s._den
            lo = s.val - val
            body = s._num[:max(0, prec - s.val)]
            row = [0] * lo + [c * f for c in body]
            row.extend([0] * (prec - val - len(row)))
            out.append(row[:prec - val])
        return val, prec, den, out[0], out[1]

    def __add__(self, other) -> "QSeries":
        if isinstance(other, QSeries):
            val, prec, den, a, b = self._aligned(other)
            return QSeries._raw(val, [x + y for x, y in zip(a, b)], den, prec)
        if isinstance(other, (int, Fraction)):
            return self + QSeries.constant(other, self.prec)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return QSeries._raw(self.val, [-c for c in self._num], self._den, self.prec)

    def __sub__(self, other) -> "QSeries":
        if isinstance(other, (QSeries, int, Fraction)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other) -> "QSeries":
        return (-self) + other

    def __mul__(self, other) -> "QSeries":
        if isinstance(other, QSeries):
            a, b = self, other
            n = min(a.rel_prec, b.rel_prec)
            nums = mul_truncated(a._num, b._num, n)
            val = a.val + b.val
            return QSeries._raw(val, nums, a._den * b._den, val + n)
        if isinstance(other, (int, Fraction)):
            other = _as_fraction(other)
            return QSeries._raw(self.val, [c * other.numerator for c in self._num],
                                self._den * other.denominator, self.prec)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other) -> "QSeries":
        if isinstance(other, QSeries):
            return self * invert(other, min(self.rel_prec, other.normalized().rel_prec))
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise InvalidArgumentError("Division of a series by zero")
            return self * (1 / _as_fraction(other))
        return NotImplemented

    def __pow__(self, e: int) -> "QSeries":
        if not isinstance(e, int):
            return NotImplemented
        base = self.normalized()
        if e < 0:
            base = invert(base, base.rel_prec)
            e = -e
        result = QSeries.one(base.rel_prec)
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # ---------- 比较 ----------
    def agrees_with(self, other: "QSeries", upto: Optional[int] = None) -> bool:
        """在公共精度（或 upto 之下）逐系数相等"""
        top = min(self.prec, other.prec)
        if upto is not None:
            top = min(top, upto)
        lo = min(self.val, other.val)
        return all(self.coeff(n) == other.coeff(n) for n in range(lo, top))

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.prec == other.prec and self.agrees_with(other)

    __hash__ = None

    # ---------- U_p / V_p ----------
    def apply_Up(self, p: int) -> "QSeries":
        return apply_Up(self, p)

    def apply_Vp(self, p: int) -> "QSeries":
        return apply_Vp(self, p)

    # ---------- 文本 ----------
    def to_text(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        terms = []
        for n, c in self.items():
            if c:
                terms.append(f"{c}*q^{n}")
            if len(terms) >= 6:
                terms.append("...")
                break
        body = " + ".join(terms) if terms else "0"
        return f"QSeries({body} + O(q^{self.prec}))"


# ========== 构造 ==========
def make(val: int, coeffs: Sequence[Rational], prec: int) -> QSeries:
    """由系数窗口构造级数，不做规范化"""
    if prec <= val:
        raise InvalidArgumentError(f"prec ({prec}) must exceed val ({val})",
                                   hint="an empty coefficient window carries no information")
    return QSeries(val, coeffs, prec)


# ========== 求逆 ==========
def _inverse_unit(v: List[int], n: int) -> List[int]:
    """常数项为 1 的整数级数 v 的逆的前 n 项"""
    v = v[:n] + [0] * max(0, n - len(v))
    nonzero = [(i, c) for i, c in enumerate(v) if c and i > 0]
    if len(nonzero) * SPARSE_RATIO < n:
        h = [0] * n
        h[0] = 1
        for m in range(1, n):
            acc = 0
            for i, c in nonzero:
                if i > m:
                    break
                acc -= c * h[m - i]
            h[m] = acc
        return h

    # 牛顿迭代 g <- g + g(1 - v g)
    g = [1]
    size = 1
    while size < n:
        size = min(2 * size, n)
        e = mul_truncated(v[:size], g, size)
        e = [-c for c in e]
        e[0] += 1
        corr = mul_truncated(g, e, size)
        g = g + [0] * (size - len(g))
        g = [x + y for x, y in zip(g, corr)]
    return g


def invert(a: QSeries, prec: Optional[int] = None) -> QSeries:
    """
    1/a，使 a·invert(a) = 1 + O(q^prec)。

    a 的前导系数必须非零（可先 normalized()），其相对精度不得低于 prec。
    结果 val = -a.val，相对精度为 prec。
    """
    a = a.normalized()
    if a.is_zero():
        raise InvalidArgumentError("Cannot invert the zero series")
    if prec is None:
        prec = a.rel_prec
    if prec > a.rel_prec:
        raise PrecisionError(f"Inverse to relative precision {prec} needs input known to {prec} terms, "
                             f"have {a.rel_prec}")
    if prec <= 0:
        return QSeries._raw(-a.val, [], 1, -a.val)

    # a = q^val · U / den；U(cq)/c 为常数项 1 的整数级数
    c = a._num[0]
    u = a._num[:prec]
    scaled = [u[i] * c ** (i - 1) if i else 1 for i in range(len(u))] if c != 1 else list(u)
    h = _inverse_unit(scaled, prec)
    # 1/U = Σ h_n c^{-n-1} q^n，取公分母 c^prec
    if c == 1:
        nums, den = h, 1
    else:
        nums = [h[i] * c ** (prec - 1 - i) for i in range(prec)]
        den = c ** prec
    return QSeries._raw(-a.val, [x * a._den for x in nums], den, -a.val + prec)


# ========== eta 商 ==========
@dataclass(frozen=True)
class EtaQuotientSpec:
    """Π η(dτ)^e"""
    factors: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple((int(d), int(e)) for d, e in self.factors))
        for d, _ in self.factors:
            if d <= 0:
                raise InvalidArgumentError(f"Eta scale must be positive, got {d}")
        total = sum(d * e for d, e in self.factors)
        if total % 24:
            raise InvalidArgumentError(f"Eta quotient {self.factors} has sum(d*e) = {total}, not divisible by 24",
                                       hint="the leading q-power would not be integral")

    @property
    def val(self) -> int:
        return sum(d * e for d, e in self.factors) // 24

    def weight(self) -> Fraction:
        return Fraction(sum(e for _, e in self.factors), 2)


@lru_cache(maxsize=None)
def _pentagonal(n: int) -> Tuple[int, ...]:
    """Π_{m≥1}(1 - q^m) 的前 n 项（五边形数定理）"""
    out = [0] * n
    if n:
        out[0] = 1
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        if g1 >= n:
            break
        sign = -1 if k % 2 else 1
        out[g1] = sign
        g2 = k * (3 * k + 1) // 2
        if g2 < n:
            out[g2] = sign
        k += 1
    return tuple(out)


def _sparse_power(f: Sequence[int], e: int, n: int) -> List[int]:
    """
    常数项为 1 的稀疏整数级数 f 的 e 次幂（e 可为负）的前 n 项。
    递推 m·g_m = Σ_{i=1}^{m} ((e+1)i - m) f_i g_{m-i}。
    """
    g = [0] * n
    if not n:
        return g
    g[0] = 1
    nonzero = [(i, c) for i, c in enumerate(f[:n]) if c and i > 0]
    for m in range(1, n):
        acc = 0
        for i, c in nonzero:
            if i > m:
                break
            acc += ((e + 1) * i - m) * c * g[m - i]
        q, r = divmod(acc, m)
        if r:
            raise IntegralityError(f"Power recurrence produced a non-integer coefficient at q^{m}")
        g[m] = q
    return g


def _stretch(f: Sequence[int], d: int, n: int) -> List[int]:
    out = [0] * n
    for i, c in enumerate(f):
        if i * d >= n:
            break
        out[i * d] = c
    return out


def eta_quotient(spec: EtaQuotientSpec, prec: int) -> QSeries:
    """
    展开 Π η(dτ)^e 至 O(q^prec)；结果 val = Σ d·e / 24，系数为整数。
    """
    if isinstance(spec, (list, tuple)):
        spec = EtaQuotientSpec(tuple(spec))
    val = spec.val
    n = prec - val
    if n <= 0:
        raise InvalidArgumentError(f"prec {prec} must exceed the eta quotient's valuation {val}")
    body = [1] + [0] * (n - 1)
    for d, e in spec.factors:
        if e == 0:
            continue
        m = -(-n // d)
        powered = _sparse_power(_pentagonal(m), e, m)
        body = mul_truncated(body, _stretch(powered, d, n), n)
    return QSeries._raw(val, body, 1, prec)


# ========== 幂积的精度规划 ==========
SeriesBuilder = Callable[[int], QSeries]


def series_product(factors: Iterable[Tuple[SeriesBuilder, int, int]], prec: int) -> QSeries:
    """
    Π builder(·)^e 至 O(q^prec)。

    factors 中每项为 (builder, val, e)：builder(P) 返回 val 为 val、精度 O(q^P) 的级数。
    总赋值 V = Σ e·val，每个因子都按相对精度 prec - V 构造。
    """
    factors = list(factors)
    total_val = sum(v * e for _, v, e in factors)
    n = prec - total_val
    if n <= 0:
        raise InvalidArgumentError(f"prec {prec} must exceed the product's valuation {total_val}")
    result = QSeries.one(n)
    for builder, v, e in factors:
        if e == 0:
            continue
        s = builder(v + n).normalized()
        if s.val != v:
            raise InvalidArgumentError(f"Factor declared val {v} but has valuation {s.val}")
        result = result * (s ** e)
    return result


# ========== U_p / V_p ==========
def apply_Vp(a: QSeries, p: int) -> QSeries:
    """(f|V_p)(τ) = f(pτ)"""
    if p < 1:
        raise InvalidArgumentError(f"V_p needs a positive integer, got {p}")
    if p == 1:
        return a
    n = a.rel_prec
    nums = [0] * (p * n)
    for i, c in enumerate(a._num):
        nums[p * i] = c
    # 窗口 [p·val, p·prec)
    return QSeries._raw(p * a.val, nums, a._den, p * a.prec)


def apply_Up(a: QSeries, p: int) -> QSeries:
    """(f|U_p) 的第 n 个系数为 f 的第 pn 个系数；精度 ceil(prec/p)"""
    if p < 1:
        raise InvalidArgumentError(f"U_p needs a positive integer, got {p}")
    if p == 1:
        return a
    lo = -(-a.val // p)
    hi = -(-a.prec // p)
    nums = [a._num[p * n - a.val] for n in range(lo, hi)]
    return QSeries._raw(lo, nums, a._den, hi)


# ========== p 进赋值 ==========
def vp(x: Rational, p: int) -> Union[int, float]:
    """v_p(x)；x = 0 时返回 inf"""
    if p < 2:
        raise InvalidArgumentError(f"v_p needs p >= 2, got {p}")
    x = _as_fraction(x)
    if x == 0:
        return math.inf
    count = 0
    num, den = abs(x.numerator), x.denominator
    while num % p == 0:
        num //= p
        count += 1
    while den % p == 0:
        den //= p
        count -= 1
    return count


def min_vp(values: Iterable[Rational], p: int) -> Union[int, float]:
    return min((vp(x, p) for x in values), default=math.inf)


# ========== 序列化 ==========
def to_text(a: QSeries) -> str:
    """逐位精确的文本格式：首行头部，之后每个指数一行"""
    lines = [f"{SERIES_HEADER} val={a.val} prec={a.prec}"]
    for n, c in a.items():
        lines.append(f"{n} {c}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> QSeries:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InvalidArgumentError("Empty serialized series")
    m = _HEADER_RE.match(lines[0].strip())
    if not m:
        raise InvalidArgumentError(f"Bad series header: {lines[0]!r}")
    val, prec = int(m.group(1)), int(m.group(2))
    body = lines[1:]
    if len(body) != prec - val:
        raise InvalidArgumentError(f"Serialized series has {len(body)} coefficient lines, expected {prec - val}")
    coeffs = []
    for expected, ln in enumerate(body, start=val):
        exp_str, _, coeff_str = ln.strip().partition(" ")
        try:
            exponent, coeff = int(exp_str), Fraction(coeff_str.strip())
        except (ValueError, ZeroDivisionError):
            raise InvalidArgumentError(f"Bad coefficient line {ln.strip()!r}",
                                       hint="each line must read '<exponent> <rational>'")
        if exponent != expected:
            raise InvalidArgumentError(f"Expected exponent {expected}, found {exp_str}")
        coeffs.append(coeff)
    return QSeries(val, coeffs, prec)
