"""
测试示例 - 可以直接运行，也可以交给 pytest
"""
import json
import sys
from pathlib import Path

import yaml

from whmf import WhmfConfig, run_verification

FAST = WhmfConfig(verify_prec_floor=0, verify_margin=20)


def run_example(output_dir: Path):
    """
    端到端：对几个 (p, k) 运行验证，检查 RUN 目录中的报告、Manifest 与日志
    """
    print("=" * 60)
    print("WHMF 验证示例")
    print("=" * 60)

    pairs = [(2, 4), (3, 6), (5, 4)]
    manifest, reports = run_verification(pairs, output_dir=str(output_dir), config=FAST)

    run_dir = output_dir / manifest.run_id
    print(f"\n运行目录: {run_dir}")
    for report in reports:
        print(f"  (p={report.p}, k={report.k}) d={report.d} ε={report.epsilon} "
              f"pass={report.passed} elapsed={report.elapsed_ms}ms")

    assert manifest.run_id.startswith("RUN_") and manifest.run_id.endswith("_UTC")
    assert [(r.p, r.k) for r in reports] == pairs
    assert all(r.passed for r in reports)

    with open(run_dir / "manifest.yml", "r", encoding="utf-8") as f:
        written = yaml.safe_load(f)
    assert written["run_id"] == manifest.run_id
    assert [o["pass"] for o in written["outputs"]] == [True, True, True]

    report_path = run_dir / written["outputs"][0]["report"]
    data = json.loads(report_path.read_text(encoding="utf-8"))
    assert data["p"] == 2 and data["k"] == 4
    assert len(data["tests"]) == data["d"] - 1

    csv_text = (run_dir / "csv" / "tests_p2_k4.csv").read_text(encoding="utf-8")
    assert csv_text.startswith("j,target,constant,N,")
    assert len(csv_text.splitlines()) == len(data["tests"]) + 1

    events = [json.loads(line)["event"]
              for line in (run_dir / "logs" / "run.log.jsonl").read_text(encoding="utf-8").splitlines()]
    assert events[0] == "run.start"
    assert events[-1] == "run.end"
    assert "verify.test" in events
    print("\n✅ 验证通过")


def test_run_verification(tmp_path):
    run_example(tmp_path)


if __name__ == "__main__":
    run_example(Path(sys.argv[1]) if len(sys.argv) > 1 else Path("outputs"))
