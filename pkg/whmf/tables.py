"""
表格数据加载（data/tables.yaml）
"""
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Tuple

import yaml

from .constants import SUPPORTED_PRIMES, SUPPORTED_WEIGHTS
from .exceptions import InvalidArgumentError

TABLES_PATH = Path(__file__).parent / "data" / "tables.yaml"
NEGATIVE_WEIGHTS = (-2, -4, -6, -8, -12)


@lru_cache(maxsize=1)
def load_tables() -> Dict[str, Any]:
    with open(TABLES_PATH, "r", encoding="utf-8") as f:
        return yaml.safe_load(f)


def check_pair(p: int, k: int):
    """(p, k) 必须属于 {2,3,5} × {4,6,8,10,14}"""
    if p not in SUPPORTED_PRIMES:
        raise InvalidArgumentError(f"Unsupported prime {p}", hint=f"choose one of {SUPPORTED_PRIMES}")
    if k not in SUPPORTED_WEIGHTS:
        raise InvalidArgumentError(f"Unsupported weight {k}", hint=f"choose one of {SUPPORTED_WEIGHTS}")


def epsilon(k: int, p: int) -> int:
    """ε_{k,p}"""
    check_pair(p, k)
    return int(load_tables()["epsilon"][p][k])


def epsilon_table() -> Dict[Tuple[int, int], int]:
    table = load_tables()["epsilon"]
    return {(int(k), int(p)): int(e) for p, row in table.items() for k, e in row.items()}


@lru_cache(maxsize=None)
def _rows() -> Dict[Tuple[int, int], Dict[str, Any]]:
    return {(row["k"], row["p"]): row for row in load_tables()["theta_alpha"]}


def theta_alpha_row(k: int, p: int) -> Dict[str, Any]:
    """θ/α 表中 (k, p) 一行；k 为负权"""
    row = _rows().get((k, p))
    if row is None:
        raise InvalidArgumentError(f"No theta/alpha entry for weight {k}, level {p}",
                                   hint=f"weights {NEGATIVE_WEIGHTS}, primes {SUPPORTED_PRIMES}")
    return row


def congruence_witness(k: int) -> str:
    return load_tables()["congruence_witness"][k]
