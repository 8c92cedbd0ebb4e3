"""
WHMF - 弱全纯模形式的典范基、p 级表格与整除性证书
"""

__version__ = "0.1.0"

from .config import WhmfConfig
from .exceptions import WhmfError
from .level_one import a_coeff, canonical_form, delta, eisenstein, jfunc
from .level_p import theta_alpha
from .integral_bases import integral_basis
from .qseries import QSeries, eta_quotient
from .runner import run_verification
from .verifier import Verifier, decompose, scan_theorem1, verify_all, verify_theorem5
from .models import (
    LogLevel,
    ErrorCode,
    CanonicalForm,
    LevelPForm,
    ThetaAlphaEntry,
    IntegralBasis,
    Decomposition,
    JTestResult,
    VerificationReport,
    Manifest,
    OutputItem,
)

__all__ = [
    "WhmfConfig",
    "WhmfError",
    "QSeries",
    "eta_quotient",
    "a_coeff",
    "canonical_form",
    "delta",
    "eisenstein",
    "jfunc",
    "theta_alpha",
    "integral_basis",
    "decompose",
    "Verifier",
    "verify_theorem5",
    "verify_all",
    "scan_theorem1",
    "run_verification",
    "LogLevel",
    "ErrorCode",
    "CanonicalForm",
    "LevelPForm",
    "ThetaAlphaEntry",
    "IntegralBasis",
    "Decomposition",
    "JTestResult",
    "VerificationReport",
    "Manifest",
    "OutputItem",
]
