"""
数据类与枚举定义
"""
from __future__ import annotations
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Tuple, Union

if TYPE_CHECKING:
    from .qseries import QSeries

Valuation = Union[int, float]   # 整数或 math.inf


# ========== 枚举 ==========
class LogLevel(str, Enum):
    INFO = "INFO"
    DEBUG = "DEBUG"
    WARN = "WARN"
    ERROR = "ERROR"


class ErrorCode(str, Enum):
    INVALID_ARGUMENT = "InvalidArgumentError"
    PRECISION = "PrecisionError"
    INTEGRALITY = "IntegralityError"
    DECOMPOSITION = "DecompositionError"
    CERTIFICATE = "CertificateError"
    CACHE = "CacheError"
    OUTPUT_WRITE = "OutputWriteError"


class NewformName(str, Enum):
    Xi8 = "Xi8"
    Xi10 = "Xi10"
    Omega6 = "Omega6"
    Lambda4 = "Lambda4"
    Lambda6 = "Lambda6"


class FormTag(str, Enum):
    E = "E"
    delta = "delta"
    j = "j"
    f = "f"
    S = "S"
    T = "T"
    newform = "newform"
    phi = "phi"
    psi = "psi"
    theta = "theta"
    alpha = "alpha"
    B = "B"


# ========== 水平 1 ==========
@dataclass(frozen=True)
class WeightSplit:
    """k = 12·ell + kprime，kprime ∈ {0,4,6,8,10,14}"""
    k: int
    ell: int
    kprime: int


@dataclass
class CanonicalForm:
    """
    典范基元素 f_{k,m} = q^{-m} + O(q^{ell+1})。
    series 中 q^n (n > ell) 的系数即 a_k(m, n)。
    """
    k: int
    m: int
    series: "QSeries"
    ell: int

    def coefficient(self, n: int) -> int:
        return self.series.int_coeff(n)


# ========== 水平 p ==========
@dataclass
class LevelPForm:
    weight: int
    p: int
    series: "QSeries"
    integral: bool = False
    name: Optional[str] = None

    def __post_init__(self):
        if self.integral and not self.series.is_integral():
            from .exceptions import IntegralityError
            raise IntegralityError(f"{self.name or 'form'} of weight {self.weight}, level {self.p} "
                                   "is flagged integral but has a non-integral coefficient")


@dataclass
class ThetaAlphaEntry:
    """表中一行：θ_{k,p}, α_{k,p}, μ_{k,p}, ν_{k,p} 以及 θ 在 ∞ 处的极点阶"""
    k: int
    p: int
    theta: "QSeries"
    alpha: "QSeries"
    mu: int
    nu: int
    pole_order_at_infty: int


@dataclass
class IntegralBasis:
    """M_k(p) 的整基 B_{n,k,p} = q^n + O(q^d)，elements[n] 即 B_n"""
    k: int
    p: int
    d: int
    elements: List["QSeries"] = field(default_factory=list)


# ========== 证书 ==========
@dataclass
class Decomposition:
    """f = Σ_{i=0}^{N} B_i Φ^i α_{2-k}"""
    p: int
    k: int
    target: str
    B: List[Fraction]
    N: int
    valuations: List[Valuation]
    remainder_ok: bool
    prec: int


@dataclass
class JTestResult:
    j: int
    target: str
    constant: Fraction
    N: int
    min_vp_Bi_igt0: Valuation
    vp_B0: Valuation
    divides: bool
    direct_scan_ok: Optional[bool] = None
    fricke_consistent: Optional[bool] = None
    prec: int = 0


@dataclass
class VerificationReport:
    p: int
    k: int
    d: int
    epsilon: int
    nu: int
    single_coefficient_applies: bool
    tests: List[JTestResult] = field(default_factory=list)
    passed: bool = False
    prec: int = 0
    elapsed_ms: int = 0


@dataclass
class ScanViolation:
    m: int
    n: int
    vp: Valuation
    bound: int


# ========== CLI ==========
@dataclass(frozen=True)
class FormSpec:
    tag: FormTag
    params: Tuple[Any, ...] = ()

    def key(self) -> str:
        return ":".join([self.tag.value] + [str(x) for x in self.params])


# ========== Manifest（运行清单）==========
@dataclass
class OutputItem:
    p: int
    k: int
    report: Optional[str]    # 相对 run 根目录的路径
    passed: bool


@dataclass
class Manifest:
    run_id: str
    pairs: List[Tuple[int, int]]
    config_profile: str
    outputs: List[OutputItem] = field(default_factory=list)
    started_at_utc: str = ""
    finished_at_utc: str = ""


# ========== 日志事件 ==========
@dataclass
class LogEvent:
    ts: str                 # "2026-10-17T14:30:12Z"
    lvl: LogLevel
    event: str              # 例如: "verify.start","decompose.done","scan.done"
    p: Optional[int] = None
    k: Optional[int] = None
    j: Optional[int] = None
    message: Optional[str] = None
    metrics: Optional[Dict[str, Any]] = None
    error_code: Optional[ErrorCode] = None
