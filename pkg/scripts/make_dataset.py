#!/usr/bin/env python3
"""Generate a labeled synthetic problem set and its augmented counterpart."""
import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from varord.augment import augment_dataset, class_distribution
from varord.dataset import GeneratorConfig, generate_synthetic, save_dataset


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-roots", type=int, default=1200)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", default="data_out")
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    roots = generate_synthetic(GeneratorConfig(n_records=args.n_roots), seed=args.seed)
    save_dataset(roots, out / "roots.jsonl")
    save_dataset(roots, out / "roots.csv")
    augmented = augment_dataset(roots)
    save_dataset(augmented, out / "augmented.jsonl")
    save_dataset(augmented, out / "augmented.csv")
    dist = class_distribution(augmented)
    print(f"{len(roots)} roots -> {len(augmented)} augmented records")
    print(f"augmented class counts: {list(dist.counts)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
