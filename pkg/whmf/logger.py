"""
日志系统 - 文本和JSONL格式
"""
import itertools
import json
import logging
import math
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional

from .models import ErrorCode, LogEvent, LogLevel

_LEVEL_ORDER = {LogLevel.DEBUG: 10, LogLevel.INFO: 20, LogLevel.WARN: 30, LogLevel.ERROR: 40}
_instance_ids = itertools.count()


class DualLogger:
    """
    双格式日志记录器（文本 + JSONL）

    log_dir 为 None 时只向 stderr 输出文本行（库调用与 CLI 的默认情形）。
    """

    def __init__(self, log_dir: Optional[Path] = None, log_level: LogLevel = LogLevel.INFO):
        self.log_dir = Path(log_dir) if log_dir is not None else None
        self.log_level = log_level

        # 每个实例独立的 logger 名，避免 handler 在多次运行间累积
        self.txt_logger = logging.getLogger(f"whmf.run.{next(_instance_ids)}")
        self.txt_logger.setLevel(logging.DEBUG)
        self.txt_logger.propagate = False
        fmt = logging.Formatter("[%(asctime)s %(levelname)s] %(message)s",
                                datefmt="%Y-%m-%dT%H:%M:%SZ")

        self.jsonl_file = None
        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)
            handler: logging.Handler = logging.FileHandler(self.log_dir / "run.log.txt", encoding="utf-8")
            self.jsonl_path = self.log_dir / "run.log.jsonl"
            self.jsonl_file = open(self.jsonl_path, "w", encoding="utf-8")
        else:
            handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(fmt)
        self.txt_logger.addHandler(handler)

    def enabled(self, level: LogLevel) -> bool:
        return _LEVEL_ORDER[level] >= _LEVEL_ORDER[self.log_level]

    def log(self, event: str, level: LogLevel = LogLevel.INFO,
            p: Optional[int] = None, k: Optional[int] = None, j: Optional[int] = None,
            message: Optional[str] = None,
            metrics: Optional[Dict[str, Any]] = None,
            error_code: Optional[ErrorCode] = None):
        """
        记录日志事件
        """
        if not self.enabled(level):
            return

        ts = datetime.now(timezone.utc).isoformat(timespec="seconds").replace("+00:00", "Z")
        log_event = LogEvent(ts=ts, lvl=level, event=event, p=p, k=k, j=j,
                             message=message, metrics=metrics, error_code=error_code)

        metrics_converted = (self._convert_to_json_serializable(log_event.metrics)
                             if log_event.metrics else None)

        if self.jsonl_file is not None:
            json_obj: Dict[str, Any] = {
                "ts": log_event.ts,
                "lvl": log_event.lvl.value,
                "event": log_event.event,
            }
            for key in ("p", "k", "j"):
                value = getattr(log_event, key)
                if value is not None:
                    json_obj[key] = value
            if log_event.message:
                json_obj["message"] = log_event.message
            if metrics_converted:
                json_obj["metrics"] = metrics_converted
            if log_event.error_code:
                json_obj["error_code"] = log_event.error_code.value
            self.jsonl_file.write(json.dumps(json_obj, ensure_ascii=False) + "\n")
            self.jsonl_file.flush()

        # 文本日志
        parts = [log_event.event]
        for key in ("p", "k", "j"):
            value = getattr(log_event, key)
            if value is not None:
                parts.append(f"{key}={value}")
        if log_event.message:
            parts.append(log_event.message)
        if metrics_converted:
            parts.append(" ".join(f"{key}={value}" for key, value in metrics_converted.items()))
        if log_event.error_code:
            parts.append(f"error_code={log_event.error_code.value}")
        msg = " ".join(parts)

        if level == LogLevel.ERROR:
            self.txt_logger.error(msg)
        elif level == LogLevel.WARN:
            self.txt_logger.warning(msg)
        elif level == LogLevel.DEBUG:
            self.txt_logger.debug(msg)
        else:
            self.txt_logger.info(msg)

    def _convert_to_json_serializable(self, obj):
        """
        将 numpy/pandas 类型、Fraction 和无穷大转换为 JSON 可序列化的 Python 原生类型
        """
        import numpy as np
        import pandas as pd

        if isinstance(obj, dict):
            return {key: self._convert_to_json_serializable(v) for key, v in obj.items()}
        elif isinstance(obj, (list, tuple)):
            return [self._convert_to_json_serializable(item) for item in obj]
        elif isinstance(obj, bool):
            return obj
        elif isinstance(obj, Fraction):
            return str(obj)
        elif isinstance(obj, float) and math.isinf(obj):
            return None
        elif isinstance(obj, np.integer):
            return int(obj)
        elif isinstance(obj, np.floating):
            return float(obj)
        elif isinstance(obj, np.bool_):
            return bool(obj)
        elif isinstance(obj, np.ndarray):
            return obj.tolist()
        elif isinstance(obj, (str, int)):
            return obj
        elif pd.isna(obj):
            return None
        return obj

    def close(self):
        """关闭日志文件与 handler"""
        if self.jsonl_file:
            self.jsonl_file.close()
            self.jsonl_file = None
        for handler in list(self.txt_logger.handlers):
            handler.close()
            self.txt_logger.removeHandler(handler)
