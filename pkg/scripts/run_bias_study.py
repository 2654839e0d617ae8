#!/usr/bin/env python3
"""Run the full bias/leakage study and print the headline numbers.

Equivalent to `varord repro-bias-study`, kept as a script so the experiment
is easy to tweak in place (scale, grids, split modes).
"""
import argparse
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from varord.pipeline import StudyConfig, run_bias_study, study_config_from_json


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", default="study_out")
    parser.add_argument("--config", default=None, help="JSON overrides for StudyConfig")
    args = parser.parse_args()

    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = study_config_from_json(json.load(fh))
    else:
        cfg = StudyConfig()

    start = time.monotonic()
    result = run_bias_study(cfg, seed=args.seed, outdir=args.out_dir)
    elapsed = time.monotonic() - start

    print(f"done in {elapsed:.0f}s -> {args.out_dir}")
    print(
        f"biased dataset: {result.summary['bias_size']} records, "
        f"imbalance ratio {result.summary['biased_imbalance_ratio']:.2f}"
    )
    print(
        f"balanced dataset: {sum(result.summary['balanced_class_counts'])} records, "
        f"imbalance ratio {result.summary['balanced_imbalance_ratio']:.2f}"
    )
    for mode, report in result.reports.items():
        print(f"\n[{mode} split]")
        for direction in report.directions:
            print(f"  trained on {direction.train_dataset}, evaluated on {direction.eval_dataset} (all):")
            for row in direction.rows:
                drop = direction_drop = row.test_accuracy - row.cross_accuracy
                print(
                    f"    {row.family:5s} test {row.test_accuracy:.3f}  "
                    f"cross {row.cross_accuracy:.3f}  (gap {direction_drop:+.3f})"
                )
    return 0


if __name__ == "__main__":
    sys.exit(main())
