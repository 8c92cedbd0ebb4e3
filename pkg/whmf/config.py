"""
配置类定义
"""
from dataclasses import dataclass
from typing import Optional
from .models import LogLevel
from .constants import (
    DEFAULT_EXPAND_PREC,
    DEFAULT_VERIFY_PREC_FLOOR,
    DEFAULT_VERIFY_MARGIN,
    DEFAULT_BASIS_GUARD,
    DEFAULT_DECOMPOSE_MIN_CHECK,
    DEFAULT_FRICKE_WINDOW,
    DEFAULT_WORKERS,
)


@dataclass
class WhmfConfig:
    # 展开
    expand_prec: int = DEFAULT_EXPAND_PREC

    # 有限测试集验证
    verify_prec_floor: int = DEFAULT_VERIFY_PREC_FLOOR  # 每个测试形式至少展开到 O(q^floor)
    verify_margin: int = DEFAULT_VERIFY_MARGIN          # N + d 之外额外核对的系数个数
    decompose_min_check: int = DEFAULT_DECOMPOSE_MIN_CHECK
    fricke_window: int = DEFAULT_FRICKE_WINDOW          # 尖点 0 一侧交叉核对的系数个数
    direct_scan: bool = True
    fricke_cross_check: bool = True

    # 整基
    basis_guard: int = DEFAULT_BASIS_GUARD

    # 缓存
    cache_dir: Optional[str] = None     # None 时依次取环境变量与默认目录
    use_cache: bool = True

    # 并行（verify --all）
    workers: int = DEFAULT_WORKERS

    # 日志
    log_level: LogLevel = LogLevel.INFO
