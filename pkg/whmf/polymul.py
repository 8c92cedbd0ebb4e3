"""
整数系数多项式乘法：朴素乘法 + Karatsuba 分治

所有 q 级数的乘法最终落到这里（QSeries 以整数分子 + 公分母存储）。
"""
import random
import time
from typing import Iterable, List, Optional, Sequence

import pandas as pd

from .constants import KARATSUBA_THRESHOLD


def schoolbook(a: Sequence[int], b: Sequence[int], n: Optional[int] = None) -> List[int]:
    """朴素乘法，只保留前 n 个系数（n 为 None 时返回完整乘积）"""
    if not a or not b:
        return [0] * (n or 0)
    if n is None:
        n = len(a) + len(b) - 1
    out = [0] * n
    lb = len(b)
    for i, x in enumerate(a[:n]):
        if not x:
            continue
        lim = min(lb, n - i)
        for j in range(lim):
            y = b[j]
            if y:
                out[i + j] += x * y
    return out


def _add(a: Sequence[int], b: Sequence[int]) -> List[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, y in enumerate(b):
        out[i] += y
    return out


def karatsuba(a: Sequence[int], b: Sequence[int], threshold: int = KARATSUBA_THRESHOLD) -> List[int]:
    """
    完整乘积 a·b（长度 len(a)+len(b)-1）

    较短因子不超过 threshold 时退回朴素乘法；长度悬殊时把长因子按短因子长度分块。
    """
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return []
    if la < lb:
        a, b, la, lb = b, a, lb, la
    if lb <= threshold:
        return schoolbook(a, b)

    out = [0] * (la + lb - 1)
    if la > 2 * lb:
        for start in range(0, la, lb):
            part = karatsuba(a[start:start + lb], b, threshold)
            for i, c in enumerate(part):
                out[start + i] += c
        return out

    m = la // 2
    a0, a1 = a[:m], a[m:]
    b0, b1 = b[:m], b[m:]
    z0 = karatsuba(a0, b0, threshold)
    z2 = karatsuba(a1, b1, threshold)
    z1 = karatsuba(_add(a0, a1), _add(b0, b1), threshold)
    for i, c in enumerate(z0):
        out[i] += c
        z1[i] -= c
    for i, c in enumerate(z2):
        out[i + 2 * m] += c
        z1[i] -= c
    for i, c in enumerate(z1):
        if c:
            out[i + m] += c
    return out


def mul_truncated(a: Sequence[int], b: Sequence[int], n: int,
                  threshold: int = KARATSUBA_THRESHOLD) -> List[int]:
    """a·b mod x^n"""
    if n <= 0:
        return []
    a = a[:n]
    b = b[:n]
    if min(len(a), len(b)) <= threshold:
        return schoolbook(a, b, n)
    full = karatsuba(a, b, threshold)
    full = full[:n]
    if len(full) < n:
        full.extend([0] * (n - len(full)))
    return full


def benchmark(sizes: Iterable[int] = (16, 32, 64, 128, 256), digits: int = 100,
              repeat: int = 3, seed: int = 0) -> pd.DataFrame:
    """
    对比朴素乘法与 Karatsuba 的耗时（毫秒），用于调整 KARATSUBA_THRESHOLD。
    系数为 digits 位左右的随机整数，模拟验证阶段系数的规模。
    """
    rng = random.Random(seed)
    bound = 10 ** digits
    rows = []
    for size in sizes:
        a = [rng.randrange(-bound, bound) for _ in range(size)]
        b = [rng.randrange(-bound, bound) for _ in range(size)]

        t0 = time.perf_counter()
        for _ in range(repeat):
            ref = schoolbook(a, b)
        t1 = time.perf_counter()
        for _ in range(repeat):
            fast = karatsuba(a, b, threshold=8)
        t2 = time.perf_counter()

        rows.append({
            "size": size,
            "schoolbook_ms": (t1 - t0) * 1000 / repeat,
            "karatsuba_ms": (t2 - t1) * 1000 / repeat,
            "agree": ref == fast,
        })
    return pd.DataFrame(rows, columns=["size", "schoolbook_ms", "karatsuba_ms", "agree"])
