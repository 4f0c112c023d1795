#!/usr/bin/env python3
"""Run all four shipped benchmark presets at paper scale into results/.

Usage: python scripts/run_all_experiments.py [--out results] [--threads N]

Expect roughly 15-30 minutes total; fig2/fig3 run on 256^2 grids.
"""

import argparse
import sys
from pathlib import Path

from rotsplit.cli import run_experiment
from rotsplit.config import load_config, preset_names, resolve_config_path


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--only", nargs="*", default=None,
                    help="subset of presets, e.g. --only fig1 fig4")
    args = ap.parse_args()
    names = args.only or preset_names()
    for name in names:
        print(f"=== {name} ===")
        path = resolve_config_path(name)
        cfg = load_config(path)
        run_experiment(cfg, Path(args.out), threads=args.threads,
                       config_dir=path.parent)
    return 0


if __name__ == "__main__":
    sys.exit(main())
