"""Command-line interface.

Subcommands cover the full workflow: featurize, label, augment, split, train,
evaluate, experiment, repro-bias-study.  Exit code 0 on success, 2 on
validation errors (bad input files, schema violations, invalid flags).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .augment import augment_dataset, class_distribution, imbalance_ratio
from .cadcost import rank_orderings
from .dataset import (
    Dataset,
    ProblemRecord,
    SchemaError,
    SplitSpec,
    label_from_timings,
    load_dataset,
    save_dataset,
    split,
)
from .features import fit_scaler, transform_matrix
from .models import (
    ModelFormatError,
    accuracy,
    grid_search,
    load_model,
    save_model,
    train,
)
from .models.params import DEFAULT_GRIDS, FAMILIES, params_from_dict
from .pipeline import (
    dataset_matrix,
    experiment_config_from_json,
    run_bias_study,
    run_experiment,
    study_config_from_json,
    write_report,
)
from .polysys import ParseError, n_labels


def _read_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def cmd_featurize(args) -> int:
    if Path(args.infile).suffix != ".jsonl":
        raise SchemaError("featurize expects a problems.jsonl input")
    dataset = load_dataset(args.infile)
    save_dataset(dataset, args.outfile)
    print(f"featurized {len(dataset)} records -> {args.outfile}")
    return 0


def _load_timings_csv(path: str, k: int) -> dict[str, tuple[float, ...]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = ["id"] + [f"t{i}" for i in range(k)]
        if header is None or header[: len(expected)] != expected:
            raise SchemaError(f"{path}: timings file must have columns {','.join(expected)}")
        table = {}
        for rowno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                table[row[0]] = tuple(float(v) for v in row[1 : k + 1])
            except (ValueError, IndexError) as exc:
                raise SchemaError(f"{path} row {rowno}: {exc}") from exc
    return table


def cmd_label(args) -> int:
    dataset = load_dataset(args.infile)
    k = n_labels(dataset.nvars)
    if args.oracle is None and args.timings is None:
        raise SchemaError("label requires --oracle sotd or --timings <file>")
    relabeled = []
    if args.oracle is not None:
        if args.oracle != "sotd":
            raise SchemaError(f"unknown oracle {args.oracle!r}")
        for r in dataset.records:
            if r.system is None:
                raise SchemaError(f"record {r.id} has no system; oracle labeling needs systems")
            table = rank_orderings(r.system)
            timings = tuple(float(c.total_sotd) for c in table.costs)
            label, tie = label_from_timings(timings)
            relabeled.append(
                ProblemRecord(
                    id=r.id, orbit_id=r.orbit_id, perm=r.perm, system=r.system,
                    features=r.features, timings=timings, label=label, tie=tie,
                )
            )
    else:
        join = _load_timings_csv(args.timings, k)
        for r in dataset.records:
            if r.id not in join:
                raise SchemaError(f"record {r.id} has no row in the timings file")
            timings = join[r.id]
            try:
                label, tie = label_from_timings(timings)
            except ValueError as exc:
                raise SchemaError(f"record {r.id}: {exc}") from exc
            relabeled.append(
                ProblemRecord(
                    id=r.id, orbit_id=r.orbit_id, perm=r.perm, system=r.system,
                    features=r.features, timings=timings, label=label, tie=tie,
                )
            )
    save_dataset(Dataset(tuple(relabeled), dataset.provenance), args.outfile)
    print(f"labeled {len(relabeled)} records -> {args.outfile}")
    return 0


def cmd_augment(args) -> int:
    dataset = load_dataset(args.infile)
    augmented = augment_dataset(dataset)
    save_dataset(augmented, args.outfile)
    dist = class_distribution(augmented) if all(
        r.label is not None for r in augmented.records
    ) else None
    if args.dist:
        if dist is None:
            raise SchemaError("--dist requires labeled records")
        with open(args.dist, "w", encoding="utf-8", newline="") as fh:
            fh.write("label,count\n")
            for label, count in enumerate(dist.counts):
                fh.write(f"{label},{count}\n")
    if args.summary:
        if dist is None:
            raise SchemaError("--summary requires labeled records")
        payload = {
            "records": dist.total,
            "counts": list(dist.counts),
            "imbalance_ratio": imbalance_ratio(dist),
        }
        with open(args.summary, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
    print(f"augmented {len(dataset)} roots -> {len(augmented)} records -> {args.outfile}")
    return 0


def cmd_split(args) -> int:
    dataset = load_dataset(args.infile)
    spec = SplitSpec(test_fraction=args.fraction, seed=args.seed, mode=args.mode)
    train_ds, test_ds = split(dataset, spec)
    save_dataset(train_ds, args.train_out)
    save_dataset(test_ds, args.test_out)
    print(f"split {len(dataset)} -> train {len(train_ds)} / test {len(test_ds)}")
    return 0


def cmd_train(args) -> int:
    dataset = load_dataset(args.infile)
    if args.family not in FAMILIES:
        raise SchemaError(f"unknown family {args.family!r}; choose from {', '.join(FAMILIES)}")
    x_raw, y = dataset_matrix(dataset)
    scaler = fit_scaler(x_raw)
    x = transform_matrix(scaler, x_raw)
    if args.grid:
        spec = _read_json(args.grid)
        entries = spec[args.family] if isinstance(spec, dict) else spec
        grid = tuple(params_from_dict(args.family, e) for e in entries)
    else:
        grid = DEFAULT_GRIDS[args.family]
    n_classes = n_labels(dataset.nvars)
    best, table = grid_search(args.family, grid, x, y, k=args.cv_folds, seed=args.seed,
                              n_classes=n_classes)
    model = train(args.family, best, x, y, seed=args.seed, n_classes=n_classes, scaler=scaler)
    save_model(model, args.outfile)
    best_mean = next(e.cv.mean for e in table if e.params == best)
    print(
        f"trained {args.family} on {len(dataset)} records; "
        f"best cv accuracy {best_mean:.4f} -> {args.outfile}"
    )
    return 0


def cmd_evaluate(args) -> int:
    model = load_model(args.model)
    dataset = load_dataset(args.infile)
    x_raw, y = dataset_matrix(dataset)
    x = transform_matrix(model.scaler, x_raw) if model.scaler else x_raw
    acc = accuracy(model, x, y)
    payload = {"model": str(args.model), "dataset": str(args.infile), "records": len(dataset),
               "accuracy": acc}
    text = json.dumps(payload, indent=1)
    print(text)
    if args.outfile:
        Path(args.outfile).write_text(text + "\n", encoding="utf-8")
    return 0


def cmd_experiment(args) -> int:
    dataset_a = load_dataset(args.dataset_a)
    dataset_b = load_dataset(args.dataset_b)
    cfg = experiment_config_from_json(_read_json(args.config) if args.config else {})
    report = run_experiment(dataset_a, dataset_b, cfg, seed=args.seed)
    write_report(report, args.out_dir)
    print(f"experiment written to {args.out_dir}")
    return 0


def cmd_repro_bias_study(args) -> int:
    cfg = study_config_from_json(_read_json(args.config) if args.config else {})
    result = run_bias_study(cfg, seed=args.seed, outdir=args.out_dir)
    leak = result.summary["leakage"]
    print(f"bias study written to {args.out_dir}")
    for mode in result.summary["split_modes"]:
        print(
            f"  {mode} split: balanced-side leakage {leak[mode]['balanced']:.3f}, "
            f"biased dataset size {result.summary['bias_size']}"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="varord",
        description="Variable-ordering selection experiments for polynomial elimination",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("featurize", help="problems.jsonl -> dataset.csv with feature columns")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("label", help="attach per-ordering costs and class labels")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--oracle", choices=["sotd"], default=None,
                   help="compute proxy costs from the systems")
    p.add_argument("--timings", default=None, help="CSV with columns id,t0..t5 to join by id")
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("augment", help="expand orbit roots into all variable permutations")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--dist", default=None, help="also write label,count CSV")
    p.add_argument("--summary", default=None, help="also write a JSON balance summary")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("split", help="deterministic train/test split")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--train-out", dest="train_out", required=True)
    p.add_argument("--test-out", dest="test_out", required=True)
    p.add_argument("--fraction", type=float, default=0.2)
    p.add_argument("--mode", choices=["random", "orbit"], default="random")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="grid-search and train one model family")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--family", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", default=None, help="JSON grid file (list or family-keyed dict)")
    p.add_argument("--cv-folds", dest="cv_folds", type=int, default=5)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="accuracy of a saved model on a labeled CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("experiment", help="cross-dataset evaluation in both directions")
    p.add_argument("--a", dest="dataset_a", required=True)
    p.add_argument("--b", dest="dataset_b", required=True)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser(
        "repro-bias-study",
        help="synthetic roots -> biased vs balanced datasets -> dual-split experiment",
    )
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_repro_bias_study)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, SchemaError, ModelFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
