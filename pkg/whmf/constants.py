"""
常量定义
"""

# ========== 运行目录 ==========
RUN_ID_PREFIX = "RUN"
RUN_TS_FORMAT = "%Y%m%d_%H%M%S"     # UTC 时间戳格式
RUN_ID_FORMAT = f"{RUN_ID_PREFIX}_{{ts}}_UTC"  # 例如: RUN_20261017_143012_UTC

CSV_ENCODING = "utf-8"              # 无 BOM
CSV_LINE_TERMINATOR = "\n"

# 输出目录布局（相对 RUN 根目录）
DIR_REPORTS = "reports"
DIR_CSV = "csv"
DIR_LOGS = "logs"
MANIFEST_NAME = "manifest.yml"

# ========== 缓存 ==========
CACHE_ENV_VAR = "WHMF_CACHE_DIR"
DEFAULT_CACHE_DIR = ".whmf-cache"
CACHE_SUFFIX = ".qs"

# ========== 序列化格式 ==========
SERIES_HEADER = "qseries"

# ========== 算法参数 ==========
# 分治乘法阈值：两因子中较短者不超过该长度时用朴素乘法，可用 polymul.benchmark 重新调整
KARATSUBA_THRESHOLD = 40
# 稀疏判定：非零系数占比低于 1/SPARSE_RATIO 时求逆走稀疏递推
SPARSE_RATIO = 8

SUPPORTED_PRIMES = (2, 3, 5)
SUPPORTED_WEIGHTS = (4, 6, 8, 10, 14)

# 默认配置值
DEFAULT_EXPAND_PREC = 64
DEFAULT_VERIFY_PREC_FLOOR = 500
DEFAULT_VERIFY_MARGIN = 50
DEFAULT_BASIS_GUARD = 50
DEFAULT_DECOMPOSE_MIN_CHECK = 10
DEFAULT_FRICKE_WINDOW = 20
DEFAULT_WORKERS = 1

# CLI 退出码
EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
