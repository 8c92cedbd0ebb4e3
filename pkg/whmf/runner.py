"""
批量验证入口：创建 RUN 目录、写日志、报告与 Manifest
"""
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

from .config import WhmfConfig
from .constants import DIR_LOGS, RUN_ID_FORMAT, RUN_TS_FORMAT
from .exceptions import WhmfError
from .exporter import Exporter, tests_frame
from .logger import DualLogger
from .models import LogLevel, Manifest, OutputItem, VerificationReport
from .tables import check_pair
from .verifier import verify_all


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds").replace("+00:00", "Z")


def run_verification(
    pairs: Iterable[Tuple[int, int]],
    output_dir: str = "outputs",
    config: Optional[WhmfConfig] = None,
    prec: Optional[int] = None,
    config_profile: str = "default",
) -> Tuple[Manifest, List[VerificationReport]]:
    """
    对每个 (p, k) 运行有限测试集验证

    Args:
        pairs: (p, k) 列表
        output_dir: 输出根目录，运行结果写在 <output_dir>/RUN_<ts>_UTC/
        config: 配置对象
        prec: 固定工作精度（None 时按验证器的精度规则）

    Returns:
        (Manifest, 报告列表)
    """
    if config is None:
        config = WhmfConfig()

    # 1. 参数验证
    pairs = list(pairs)
    for p, k in pairs:
        check_pair(p, k)

    # 2. 创建运行目录
    started = datetime.now(timezone.utc)
    run_id = RUN_ID_FORMAT.format(ts=started.strftime(RUN_TS_FORMAT))
    run_dir = Path(output_dir) / run_id
    run_dir.mkdir(parents=True, exist_ok=True)

    # 3. 初始化日志
    logger = DualLogger(run_dir / DIR_LOGS, config.log_level)
    manifest = Manifest(run_id=run_id, pairs=pairs, config_profile=config_profile,
                        started_at_utc=_utc_now())
    reports: List[VerificationReport] = []
    try:
        logger.log("run.start", metrics={"pairs": [[p, k] for p, k in pairs], "workers": config.workers})
        exporter = Exporter(run_dir, config)

        reports = verify_all(pairs, config, prec=prec, logger=logger)
        for report in reports:
            rel = exporter.export_report(report)
            exporter.export_csv(tests_frame(report), f"tests_p{report.p}_k{report.k}")
            manifest.outputs.append(OutputItem(p=report.p, k=report.k, report=str(rel), passed=report.passed))

        manifest.finished_at_utc = _utc_now()
        exporter.export_manifest(manifest)
        logger.log("run.end", metrics={"reports": len(reports), "passed": sum(r.passed for r in reports)})
    except WhmfError as e:
        logger.log("run.error", LogLevel.ERROR, message=str(e), error_code=e.code)
        raise
    finally:
        logger.close()
    return manifest, reports
