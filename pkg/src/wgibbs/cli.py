"""Command line front end.

    wgibbs run <config.ini> [--seed N] [--out DIR]
    wgibbs compare <dir> <dir> [...] [--out FILE]
    wgibbs validate [--trials N] [--seed N]

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numeric or
validation failure. The default output root is ./runs, overridable with the
WGIBBS_OUTPUT_ROOT environment variable; --out wins over both and over the
config's own [output] directory.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, parse_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

OUTPUT_ROOT_ENV = "WGIBBS_OUTPUT_ROOT"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wgibbs",
                                     description="Gibbs sampling with pluggable scan schedulers")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run every configured scheduler on one experiment")
    p_run.add_argument("config", help="INI experiment configuration")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--out", default=None, help="experiment output directory")

    p_cmp = sub.add_parser("compare", help="merge the primary metric of several runs")
    p_cmp.add_argument("dirs", nargs="+", help="scheduler run directories")
    p_cmp.add_argument("--out", default=None, help="write the merged CSV here (default stdout)")

    p_val = sub.add_parser("validate", help="randomized oracle suite")
    p_val.add_argument("--trials", type=int, default=None, help="trials per oracle family")
    p_val.add_argument("--seed", type=int, default=0)
    return parser


def _resolve_out_dir(cfg, config_path: Path, override: str | None) -> Path:
    if override is not None:
        return Path(override)
    if cfg.out_dir is not None:
        return Path(cfg.out_dir)
    root = os.environ.get(OUTPUT_ROOT_ENV, "runs")
    return Path(root) / config_path.stem


def _cmd_run(args) -> int:
    from .experiment import run_experiment

    config_path = Path(args.config)
    try:
        text = config_path.read_text()
    except OSError as err:
        print(f"error: cannot read config: {err}", file=sys.stderr)
        return EXIT_IO
    cfg = parse_config(text)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be nonnegative")
        cfg.seed = args.seed
    out_dir = _resolve_out_dir(cfg, config_path, args.out)
    out = run_experiment(cfg, out_dir)
    print(f"wrote {out}")
    for name in cfg.schedulers:
        print(f"  {out / name}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    from .experiment import compare_report
    from .formats import write_csv

    header, rows = compare_report(args.dirs)
    if args.out is None:
        print(",".join(header))
        for row in rows:
            print(",".join(row))
    else:
        write_csv(args.out, header, rows)
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    from .experiment import run_validation

    if args.trials is not None and args.trials < 1:
        raise ConfigError("--trials must be positive")
    ok = run_validation(args.trials, seed=args.seed)
    if not ok:
        print("validation FAILED", file=sys.stderr)
        return EXIT_NUMERIC
    print("validation passed")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    commands = {"run": _cmd_run, "compare": _cmd_compare, "validate": _cmd_validate}
    try:
        return commands[args.command](args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as err:
        print(f"numeric error: {err}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
