#!/usr/bin/env python3
"""Fit collapsed LDA to the synthetic bars corpus under each scan order and
print the final held-out perplexity and joint log likelihood."""

import argparse
import json
from pathlib import Path

from wgibbs.config import parse_config
from wgibbs.experiment import run_experiment

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sweeps", type=int, default=None,
                    help="override sweep count from the config")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--out", type=Path, default=Path("runs") / "lda")
    args = ap.parse_args()

    cfg = parse_config((ROOT / "configs" / "lda_bars.ini").read_text())
    if args.sweeps is not None:
        cfg.sweeps = args.sweeps
        cfg.burn_in_sweeps = min(cfg.burn_in_sweeps, max(args.sweeps // 10, 1))
    if args.seed is not None:
        cfg.seed = args.seed
    out = run_experiment(cfg, args.out)
    print(f"wrote {out}")
    for sched in cfg.schedulers:
        summary = json.loads((out / sched / "summary.json").read_text())
        print(f"  {sched:11s} loglik {summary['final_loglik']:.1f}  "
              f"perplexity {summary['final_perplexity']:.3f}")


if __name__ == "__main__":
    main()
