"""
测试公共设施：已发表数值的加载
"""
from pathlib import Path

import pytest
import yaml

FIXTURES = Path(__file__).parent / "fixtures"


def load_published():
    with open(FIXTURES / "published_values.yaml", "r", encoding="utf-8") as f:
        return yaml.safe_load(f)


def from_factorization(factors):
    value = 1
    for prime, exponent in factors.items():
        value *= int(prime) ** int(exponent)
    return value


@pytest.fixture(scope="session")
def published():
    return load_published()


@pytest.fixture
def cold_caches():
    """清空所有级数缓存，模拟新进程里的第一次调用"""
    from whmf import integral_bases, level_one, level_p, verifier

    for module in (verifier, level_p, integral_bases, level_one):
        module.clear_caches()
    yield
