"""
展开缓存：按 sha256(spec|prec) 命名的序列化级数文件，写入为临时文件 + 原子改名
"""
import hashlib
import os
import tempfile
from pathlib import Path
from typing import Optional

from .constants import CACHE_ENV_VAR, CACHE_SUFFIX, DEFAULT_CACHE_DIR
from .exceptions import CacheError, InvalidArgumentError
from .logger import DualLogger
from .models import LogLevel
from .qseries import QSeries, from_text, to_text


def resolve_cache_dir(flag: Optional[str] = None) -> Path:
    """--cache-dir，其次环境变量 WHMF_CACHE_DIR，最后本地 .whmf-cache/"""
    if flag:
        return Path(flag)
    env = os.environ.get(CACHE_ENV_VAR)
    if env:
        return Path(env)
    return Path(DEFAULT_CACHE_DIR)


class ExpansionCache:

    def __init__(self, root: Path, logger: Optional[DualLogger] = None):
        self.root = Path(root)
        self.logger = logger

    def path_for(self, key: str, prec: int) -> Path:
        digest = hashlib.sha256(f"{key}|{prec}".encode("utf-8")).hexdigest()
        return self.root / f"{digest}{CACHE_SUFFIX}"

    def get(self, key: str, prec: int) -> Optional[QSeries]:
        path = self.path_for(key, prec)
        if not path.exists():
            return None
        try:
            series = from_text(path.read_text(encoding="utf-8"))
        except (OSError, InvalidArgumentError, ValueError) as e:
            raise CacheError(f"Corrupt cache entry {path.name}: {e}",
                             hint="delete the file or the cache directory")
        if self.logger:
            self.logger.log("cache.hit", LogLevel.DEBUG, message=key, metrics={"prec": prec})
        return series

    def put(self, key: str, prec: int, series: QSeries) -> Path:
        path = self.path_for(key, prec)
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as f:
                    f.write(to_text(series))
                os.replace(tmp, path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
        except OSError as e:
            raise CacheError(f"Failed to write cache entry {path.name}: {e}")
        if self.logger:
            self.logger.log("cache.store", LogLevel.DEBUG, message=key, metrics={"prec": prec})
        return path
