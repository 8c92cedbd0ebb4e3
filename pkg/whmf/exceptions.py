"""
异常与错误模型
"""
from typing import Optional
from .models import ErrorCode


class WhmfError(Exception):
    """异常基类"""
    def __init__(self, code: ErrorCode, message: str, hint: Optional[str] = None):
        super().__init__(message)
        self.code = code
        self.hint = hint


class InvalidArgumentError(WhmfError):
    def __init__(self, message: str = "Invalid argument", hint: Optional[str] = None):
        super().__init__(ErrorCode.INVALID_ARGUMENT, message, hint)


class PrecisionError(WhmfError):
    def __init__(self, message: str = "Insufficient precision", hint: Optional[str] = None):
        super().__init__(ErrorCode.PRECISION, message, hint)


class IntegralityError(WhmfError):
    def __init__(self, message: str = "Expected an integral value", hint: Optional[str] = None):
        super().__init__(ErrorCode.INTEGRALITY, message, hint)


class DecompositionError(WhmfError):
    def __init__(self, message: str = "Decomposition left a nonzero remainder", hint: Optional[str] = None):
        super().__init__(ErrorCode.DECOMPOSITION, message, hint)


class CertificateError(WhmfError):
    def __init__(self, message: str = "Certificate contradicted by coefficient data", hint: Optional[str] = None):
        super().__init__(ErrorCode.CERTIFICATE, message, hint)


class CacheError(WhmfError):
    def __init__(self, message: str = "Expansion cache failure", hint: Optional[str] = None):
        super().__init__(ErrorCode.CACHE, message, hint)


class OutputWriteError(WhmfError):
    def __init__(self, message: str = "Failed to write outputs", hint: Optional[str] = None):
        super().__init__(ErrorCode.OUTPUT_WRITE, message, hint)
