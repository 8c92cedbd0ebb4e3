"""
使用示例
"""
from whmf import (WhmfConfig, a_coeff, canonical_form, decompose, integral_basis, jfunc,
                  run_verification, scan_theorem1, theta_alpha, verify_theorem5)
from whmf.qseries import vp
from whmf.verifier import build_test_form, decomposition_length


# 示例 1: 典范基系数及其 p 进赋值
def example_coefficients():
    print(jfunc(4))
    f = canonical_form(4, 1, 12)
    print(f"f_4,1 = {f.series}")
    for n in (2, 4, 5, 8, 10):
        value = a_coeff(4, 1, n)
        print(f"a_4(1,{n}) = {value}  v_2={vp(value, 2)} v_5={vp(value, 5)}")


# 示例 2: θ/α 表中的一行与整基
def example_level_p():
    entry = theta_alpha(-4, 2, 20)
    print(f"theta = {entry.theta}")
    print(f"alpha = {entry.alpha}  mu={entry.mu} nu={entry.nu}")

    basis = integral_basis(8, 3, 12)
    for n, b in enumerate(basis.elements):
        print(f"B_{n} = {b}")


# 示例 3: 单个测试形式的分解
def example_decomposition():
    p, k, j = 3, 8, 1
    N = decomposition_length(p, k, j)
    prec = 60
    dec = decompose(build_test_form(p, k, j, prec), k, p, prec, N=N)
    for i, (b, v) in enumerate(zip(dec.B, dec.valuations)):
        print(f"B_{i} = {b}  v_3 = {v}")


# 示例 4: 证书与扫描（较低的精度下限以加快速度）
def example_verify():
    config = WhmfConfig(verify_prec_floor=0, verify_margin=20)
    report = verify_theorem5(2, 4, config=config)
    print(f"(2, 4): pass={report.passed}, tests={len(report.tests)}")

    violations = scan_theorem1(2, 4, range(1, 4), range(1, 17))
    print(f"scan violations: {violations}")


# 示例 5: 批量验证，写出 RUN_<ts>_UTC 目录
def example_run():
    config = WhmfConfig(verify_prec_floor=0, verify_margin=20)
    manifest, reports = run_verification([(2, 4), (3, 4), (5, 4)], output_dir="outputs", config=config)
    print(f"run: {manifest.run_id}")
    for item in manifest.outputs:
        print(f"  ({item.p}, {item.k}) -> {item.report} pass={item.passed}")


if __name__ == "__main__":
    print("WHMF 使用示例")
    print("=" * 60)
    example_coefficients()
    example_level_p()
    example_decomposition()
    example_verify()
