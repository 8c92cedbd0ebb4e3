"""
命令行入口：expand / coeff / verify / scan / basis / table
"""
import argparse
import json
import math
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd

from . import __version__
from .cache import ExpansionCache, resolve_cache_dir
from .config import WhmfConfig
from .constants import CSV_ENCODING, CSV_LINE_TERMINATOR, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, SUPPORTED_PRIMES, SUPPORTED_WEIGHTS
from .exceptions import (CacheError, CertificateError, DecompositionError, IntegralityError,
                         InvalidArgumentError, OutputWriteError, PrecisionError, WhmfError)
from .exporter import report_to_dict, report_to_json
from .formspec import build_form, parse_form_spec
from .integral_bases import export_basis, integral_basis
from .level_one import a_coeff
from .level_p import export_theta_alpha, theta_alpha
from .logger import DualLogger
from .models import LogLevel
from .qseries import to_text, vp
from .runner import run_verification
from .verifier import Verifier, verify_all

_MATH_ERRORS = (IntegralityError, DecompositionError, CertificateError)


def _config_from_args(args) -> WhmfConfig:
    config = WhmfConfig(log_level=LogLevel(args.log_level))
    if getattr(args, "floor", None) is not None:
        config.verify_prec_floor = args.floor
    if getattr(args, "margin", None) is not None:
        config.verify_margin = args.margin
    if getattr(args, "workers", None) is not None:
        config.workers = args.workers
    if getattr(args, "no_direct_scan", False):
        config.direct_scan = False
    if getattr(args, "no_fricke", False):
        config.fricke_cross_check = False
    if getattr(args, "cache_dir", None):
        config.cache_dir = args.cache_dir
    if getattr(args, "no_cache", False):
        config.use_cache = False
    return config


# ========== 子命令 ==========
def cmd_expand(args, config: WhmfConfig, logger: DualLogger) -> int:
    spec = parse_form_spec(args.spec)
    key = spec.key()
    prec = config.expand_prec if args.prec is None else args.prec
    series = None
    cache = ExpansionCache(resolve_cache_dir(config.cache_dir), logger) if config.use_cache else None
    if cache is not None:
        series = cache.get(key, prec)
    if series is None:
        series = build_form(spec, prec)
        if cache is not None:
            cache.put(key, prec, series)
    if args.format == "json":
        payload = {"spec": key, "val": series.val, "prec": series.prec,
                   "coeffs": [str(c) for c in series.coeffs]}
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        sys.stdout.write(to_text(series))
    return EXIT_OK


def cmd_coeff(args, config: WhmfConfig, logger: DualLogger) -> int:
    value = a_coeff(args.k, args.m, args.n)
    sys.stdout.write(f"a_{args.k}({args.m},{args.n}) = {value}\n")
    for p in SUPPORTED_PRIMES:
        v = vp(value, p)
        sys.stdout.write(f"v_{p} = {'inf' if v == math.inf else v}\n")
    return EXIT_OK


def cmd_verify(args, config: WhmfConfig, logger: DualLogger) -> int:
    if args.all:
        pairs = [(p, k) for p in SUPPORTED_PRIMES for k in SUPPORTED_WEIGHTS]
    else:
        if args.p is None or args.k is None:
            raise InvalidArgumentError("verify needs --p and --k, or --all")
        pairs = [(args.p, args.k)]

    if args.out:
        _, reports = run_verification(pairs, args.out, config, prec=args.prec)
    else:
        reports = verify_all(pairs, config, prec=args.prec, logger=logger)

    if len(reports) == 1:
        sys.stdout.write(report_to_json(reports[0]))
    else:
        sys.stdout.write(json.dumps([report_to_dict(r) for r in reports], indent=2) + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VIOLATION


def cmd_scan(args, config: WhmfConfig, logger: DualLogger) -> int:
    verifier = Verifier(config, logger)
    df = verifier.scan_table(args.p, args.k, args.mmax, args.nmax, args.smax)
    bad = df[~df["ok"]] if len(df) else df
    if args.csv:
        path = Path(args.csv)
        path.parent.mkdir(parents=True, exist_ok=True)
        try:
            df.to_csv(path, encoding=CSV_ENCODING, index=False, lineterminator=CSV_LINE_TERMINATOR)
        except OSError as e:
            raise OutputWriteError(f"Failed to export scan CSV: {e}")
    violations = [{"m": int(r.m), "n": int(r.n), "vp": None if pd.isna(r.vp) else int(r.vp), "bound": int(r.bound)}
                  for r in bad.itertuples()]
    summary = {"p": args.p, "k": args.k, "checked": int(len(df)), "violations": violations}
    sys.stdout.write(json.dumps(summary, indent=2) + "\n")
    return EXIT_OK if not violations else EXIT_VIOLATION


def cmd_basis(args, config: WhmfConfig, logger: DualLogger) -> int:
    basis = integral_basis(args.k, args.p, args.prec, guard=config.basis_guard)
    if args.out:
        paths = export_basis(basis, Path(args.out))
        logger.log("basis.export", p=args.p, k=args.k, metrics={"files": len(paths)})
    for n, e in enumerate(basis.elements):
        sys.stdout.write(f"# B_{n}\n")
        sys.stdout.write(to_text(e))
    return EXIT_OK


def cmd_table(args, config: WhmfConfig, logger: DualLogger) -> int:
    entry = theta_alpha(args.k, args.p, config.expand_prec if args.prec is None else args.prec)
    if args.out:
        export_theta_alpha(entry, Path(args.out))
    meta = {"k": entry.k, "p": entry.p, "mu": entry.mu, "nu": entry.nu,
            "pole_order": entry.pole_order_at_infty}
    sys.stdout.write(json.dumps(meta) + "\n")
    sys.stdout.write("# theta\n" + to_text(entry.theta))
    sys.stdout.write("# alpha\n" + to_text(entry.alpha))
    return EXIT_OK


# ========== 参数解析 ==========
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="whmf", description="Weakly holomorphic modular forms: "
                                     "canonical bases, level-p tables and divisibility certificates")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=LogLevel.WARN.value, choices=[lv.value for lv in LogLevel])
    sub = parser.add_subparsers(dest="command", required=True)

    p_expand = sub.add_parser("expand", help="print a q-expansion")
    p_expand.add_argument("spec", help="E:k, delta, j, f:k:m, S:k:p, T:k:p, newform:NAME, phi:p, psi:p, "
                                       "theta:k:p, alpha:k:p, B:k:p:n")
    p_expand.add_argument("--prec", type=int, default=None)
    p_expand.add_argument("--format", choices=["text", "json"], default="text")
    p_expand.add_argument("--cache-dir", default=None)
    p_expand.add_argument("--no-cache", action="store_true")
    p_expand.set_defaults(func=cmd_expand)

    p_coeff = sub.add_parser("coeff", help="print a_k(m, n) and its 2-, 3-, 5-adic valuations")
    p_coeff.add_argument("k", type=int)
    p_coeff.add_argument("m", type=int)
    p_coeff.add_argument("n", type=int)
    p_coeff.set_defaults(func=cmd_coeff)

    p_verify = sub.add_parser("verify", help="run the finite certificate for (p, k)")
    p_verify.add_argument("--p", type=int)
    p_verify.add_argument("--k", type=int)
    p_verify.add_argument("--all", action="store_true")
    p_verify.add_argument("--prec", type=int, default=None)
    p_verify.add_argument("--floor", type=int, default=None)
    p_verify.add_argument("--margin", type=int, default=None)
    p_verify.add_argument("--workers", type=int, default=None)
    p_verify.add_argument("--no-direct-scan", action="store_true")
    p_verify.add_argument("--no-fricke", action="store_true")
    p_verify.add_argument("--out", default=None, help="write a RUN_<ts>_UTC directory here")
    p_verify.set_defaults(func=cmd_verify)

    p_scan = sub.add_parser("scan", help="check the valuation bound on a finite (m, n) grid")
    p_scan.add_argument("--p", type=int, required=True)
    p_scan.add_argument("--k", type=int, required=True)
    p_scan.add_argument("--mmax", type=int, required=True)
    p_scan.add_argument("--nmax", type=int, required=True)
    p_scan.add_argument("--smax", type=int, default=0)
    p_scan.add_argument("--csv", default=None)
    p_scan.set_defaults(func=cmd_scan)

    p_basis = sub.add_parser("basis", help="integral basis of M_k(p)")
    p_basis.add_argument("--k", type=int, required=True)
    p_basis.add_argument("--p", type=int, required=True)
    p_basis.add_argument("--prec", type=int, default=None)
    p_basis.add_argument("--out", default=None)
    p_basis.set_defaults(func=cmd_basis)

    p_table = sub.add_parser("table", help="theta/alpha entry for negative weight k, level p")
    p_table.add_argument("--k", type=int, required=True)
    p_table.add_argument("--p", type=int, required=True)
    p_table.add_argument("--prec", type=int, default=None)
    p_table.add_argument("--out", default=None)
    p_table.set_defaults(func=cmd_table)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _config_from_args(args)
    logger = DualLogger(None, config.log_level)
    try:
        return args.func(args, config, logger)
    except _MATH_ERRORS as e:
        logger.log("cli.failure", LogLevel.ERROR, message=str(e), error_code=e.code)
        sys.stderr.write(f"error: {e}\n")
        return EXIT_VIOLATION
    except (InvalidArgumentError, PrecisionError, CacheError, OutputWriteError, WhmfError) as e:
        sys.stderr.write(f"error: {e}\n")
        if e.hint:
            sys.stderr.write(f"hint: {e.hint}\n")
        return EXIT_USAGE
    finally:
        logger.close()


if __name__ == "__main__":
    sys.exit(main())
