"""
M_k(p) 的维数、整基与有限窗口同余
"""
import pytest

from whmf.exceptions import CertificateError, DecompositionError, InvalidArgumentError, PrecisionError
from whmf.integral_bases import (basis_coordinates, congruence_by_window, dim_mk, export_basis,
                                 integral_basis, seed_form)
from whmf.level_one import eisenstein
from whmf.level_p import newform
from whmf.models import LevelPForm
from whmf.qseries import QSeries

PRIMES = (2, 3, 5)


def test_dimension_ladders():
    assert [dim_mk(k, 2) for k in range(0, 16, 2)] == [1, 1, 2, 2, 3, 3, 4, 4]
    assert [dim_mk(k, 3) for k in range(0, 16, 2)] == [1, 1, 2, 3, 3, 4, 5, 5]
    assert [dim_mk(k, 5) for k in range(0, 16, 2)] == [1, 1, 3, 3, 5, 5, 7, 7]
    with pytest.raises(InvalidArgumentError):
        dim_mk(4, 7)
    with pytest.raises(InvalidArgumentError):
        dim_mk(3, 2)


@pytest.mark.parametrize("p", PRIMES)
@pytest.mark.parametrize("k", range(0, 28, 2))
def test_basis_is_integral_echelon(k, p):
    basis = integral_basis(k, p)
    d = dim_mk(k, p)
    assert basis.d == d == len(basis.elements)
    for n, b in enumerate(basis.elements):
        assert b.is_integral()
        for t in range(d):
            assert b.coeff(t) == (1 if t == n else 0)


@pytest.mark.parametrize("k,p", [(8, 2), (6, 3), (4, 5), (10, 5)])
def test_seed_vanishes_to_order_d_minus_one(k, p):
    seed = seed_form(k, p, 40).normalized()
    assert seed.val == dim_mk(k, p) - 1
    assert seed.coeff(seed.val) == 1


def test_basis_precision_guard():
    assert integral_basis(4, 2).elements[0].prec == 2 + 50
    assert integral_basis(4, 2, 10, guard=0).elements[0].prec == 10
    with pytest.raises(PrecisionError):
        integral_basis(10, 5, 3)


def test_coordinates_of_eisenstein_series():
    basis = integral_basis(4, 2, 40)
    assert basis_coordinates(eisenstein(4, 40), basis) == [1, 240]


def test_coordinates_of_newform():
    basis = integral_basis(8, 2, 40)
    coords = basis_coordinates(newform("Xi8", 40).series, basis)
    assert coords[:2] == [0, 1]


def test_form_outside_span_is_rejected():
    basis = integral_basis(4, 2, 40)
    with pytest.raises(DecompositionError):
        basis_coordinates(eisenstein(6, 40), basis)


def test_congruence_by_window():
    e4 = LevelPForm(weight=4, p=2, series=eisenstein(4, 60) - 1, integral=True, name="E4-1")
    assert congruence_by_window(e4, 4, 2)
    assert not congruence_by_window(e4, 5, 2)
    assert congruence_by_window(e4, 0, 2)


def test_congruence_by_window_detects_contradiction():
    # 前 d 个系数整除、窗口外某个系数不整除：不可能是 M_4(2) 中的形式
    good = (eisenstein(4, 20) - 1) * 16
    nums = good.int_coeffs()
    nums[5] += 1
    broken = QSeries.from_ints(good.val, nums, good.prec)
    with pytest.raises(CertificateError):
        congruence_by_window(LevelPForm(weight=4, p=2, series=broken, integral=True), 4, 2)


def test_export_basis(tmp_path):
    basis = integral_basis(6, 3, 12)
    paths = export_basis(basis, tmp_path)
    assert len(paths) == basis.d + 1
    assert (tmp_path / "basis_6_3.json").exists()
    assert (tmp_path / "B_0_6_3.qs").read_text(encoding="utf-8").startswith("qseries val=0 prec=12")
