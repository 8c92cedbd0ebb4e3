"""
导出系统 - JSON 报告、CSV 测试表和 Manifest
"""
import json
import math
from pathlib import Path
from typing import Any, Dict

import pandas as pd
import yaml

from .constants import CSV_ENCODING, CSV_LINE_TERMINATOR, DIR_CSV, DIR_REPORTS, MANIFEST_NAME
from .exceptions import OutputWriteError
from .models import JTestResult, Manifest, VerificationReport


def _valuation(v):
    return None if v == math.inf else int(v)


def result_to_dict(t: JTestResult) -> Dict[str, Any]:
    return {
        "j": t.j,
        "target": t.target,
        "constant": str(t.constant),
        "N": t.N,
        "min_vp_Bi_igt0": _valuation(t.min_vp_Bi_igt0),
        "vp_B0": _valuation(t.vp_B0),
        "pass": t.divides and t.direct_scan_ok is not False and t.fricke_consistent is not False,
        "certificate": t.divides,
        "direct_scan_ok": t.direct_scan_ok,
        "fricke_consistent": t.fricke_consistent,
        "prec": t.prec,
    }


def report_to_dict(report: VerificationReport) -> Dict[str, Any]:
    """VerificationReport 的 JSON 结构（键顺序固定）"""
    return {
        "p": report.p,
        "k": report.k,
        "d": report.d,
        "epsilon": report.epsilon,
        "nu": report.nu,
        "single_coefficient_applies": report.single_coefficient_applies,
        "tests": [result_to_dict(t) for t in report.tests],
        "pass": report.passed,
        "prec": report.prec,
        "elapsed_ms": report.elapsed_ms,
    }


def report_to_json(report: VerificationReport) -> str:
    return json.dumps(report_to_dict(report), ensure_ascii=False, indent=2) + "\n"


def tests_frame(report: VerificationReport) -> pd.DataFrame:
    """每个 j 一行，列同 result_to_dict"""
    return pd.DataFrame([result_to_dict(t) for t in report.tests])


class Exporter:
    """导出器"""

    def __init__(self, run_dir: Path, config):
        self.run_dir = Path(run_dir)
        self.config = config
        self.reports_dir = self.run_dir / DIR_REPORTS
        self.csv_dir = self.run_dir / DIR_CSV

    def export_report(self, report: VerificationReport) -> Path:
        """
        导出单个 (p, k) 的验证报告
        返回: 相对 run_dir 的路径
        """
        path = self.reports_dir / f"verify_p{report.p}_k{report.k}.json"
        try:
            self.reports_dir.mkdir(parents=True, exist_ok=True)
            path.write_text(report_to_json(report), encoding="utf-8")
        except OSError as e:
            raise OutputWriteError(f"Failed to export report: {e}")
        return path.relative_to(self.run_dir)

    def export_csv(self, df: pd.DataFrame, name: str) -> Path:
        path = self.csv_dir / f"{name}.csv"
        try:
            self.csv_dir.mkdir(parents=True, exist_ok=True)
            df.to_csv(path, encoding=CSV_ENCODING, index=False, lineterminator=CSV_LINE_TERMINATOR)
        except OSError as e:
            raise OutputWriteError(f"Failed to export CSV: {e}")
        return path.relative_to(self.run_dir)

    def export_manifest(self, manifest: Manifest) -> Path:
        """
        导出 Manifest YAML
        """
        manifest_path = self.run_dir / MANIFEST_NAME
        manifest_dict = {
            "run_id": manifest.run_id,
            "pairs": [[p, k] for p, k in manifest.pairs],
            "config_profile": manifest.config_profile,
            "started_at_utc": manifest.started_at_utc,
            "finished_at_utc": manifest.finished_at_utc,
            "outputs": [
                {"p": item.p, "k": item.k, "report": item.report, "pass": item.passed}
                for item in manifest.outputs
            ],
        }
        try:
            with open(manifest_path, "w", encoding="utf-8") as f:
                yaml.dump(manifest_dict, f, allow_unicode=True, default_flow_style=False, sort_keys=False)
        except OSError as e:
            raise OutputWriteError(f"Failed to export manifest: {e}")
        return manifest_path
