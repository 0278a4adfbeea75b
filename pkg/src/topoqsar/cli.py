"""Command-line entry point: ``topoqsar <command> ...``."""

from __future__ import annotations

import argparse
import configparser
import csv
import logging
import sys
from pathlib import Path

from topoqsar.eval import mean_metrics
from topoqsar.pipeline import (
    APPROACHES,
    BLOCK_ORDER,
    DATASETS,
    LARGE_DATASETS,
    DatasetError,
    featurize,
    fetch_dataset,
    load_config,
    load_dataset,
    locate_dataset,
    randomization_test,
    run_benchmark,
    run_cell,
    write_report,
)
from topoqsar.pipeline.benchmark import prepare

logger = logging.getLogger("topoqsar")

EXIT_PARTIAL = 2


def _dataset(name: str, cfg):
    path = locate_dataset(name, cfg.paths)
    if not path.is_file():
        path = fetch_dataset(name, cfg.paths)
    smiles_col, target_col = cfg.schema(name)
    return load_dataset(path, smiles_col, target_col, name=name)


def cmd_fetch(args, cfg) -> int:
    names = sorted(DATASETS) if args.name == "all" else [args.name]
    failed = 0
    for name in names:
        try:
            print(f"{name}: {fetch_dataset(name, cfg.paths)}")
        except DatasetError as exc:
            failed += 1
            print(f"{name}: {exc}", file=sys.stderr)
    if failed == len(names):
        return 1
    return EXIT_PARTIAL if failed else 0


def cmd_descriptors(args, cfg) -> int:
    blocks = args.blocks or ["activity", "graph", "physchem"]
    if args.target_col:
        ds = load_dataset(args.csv, args.smiles_col, args.target_col)
    else:
        # targets are irrelevant here; feed a dummy column through the loader path
        ds = _untargeted(args.csv, args.smiles_col)
    p = cfg.params
    table = featurize(ds, blocks, p.fp_width, p.fp_radius, p.irregularity)
    out = Path(args.out)
    with out.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = ["smiles", *table.features.names]
        if args.target_col:
            header.append(args.target_col)
        w.writerow(header)
        for i, smi in enumerate(table.smiles):
            row = [smi, *(repr(float(v)) for v in table.features.values[i])]
            if args.target_col:
                row.append(repr(float(table.targets[i])))
            w.writerow(row)
    print(f"wrote {len(table)} rows x {table.features.shape[1]} descriptors to {out}")
    return 0


def _untargeted(path, smiles_col):
    from topoqsar.pipeline.datasets import Dataset
    from topoqsar.smiles import validate_and_filter

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if smiles_col not in (reader.fieldnames or []):
            raise DatasetError(f"missing column {smiles_col!r}")
        records = [(r[smiles_col].strip(), 0.0) for r in reader]
    accepted, rejected = validate_and_filter(records)
    return Dataset(Path(path).stem, accepted, rejected=rejected, n_rows=len(records))


def cmd_run(args, cfg) -> int:
    ds = _dataset(args.dataset, cfg)
    table = prepare(ds, cfg.params, [args.approach])
    cell = run_cell(table, args.approach, args.folds, args.seed, cfg.params)
    print(f"{args.dataset} / approach {args.approach} ({APPROACHES[args.approach].name}), "
          f"{len(table)} molecules")
    print("fold,r2,rmse,mae,mse")
    for f, m in enumerate(cell.folds):
        print(f"{f},{m.r2:.4f},{m.rmse:.4f},{m.mae:.4f},{m.mse:.4f}")
    m = cell.mean
    lo, hi = cell.r2_ci()
    print(f"mean,{m.r2:.4f},{m.rmse:.4f},{m.mae:.4f},{m.mse:.4f}")
    print(f"R^2 95% CI [{lo:.4f}, {hi:.4f}]; {cell.seconds:.1f}s")
    return 0


def cmd_benchmark(args, cfg) -> int:
    names = args.datasets or sorted(DATASETS)
    if args.skip_large:
        names = [n for n in names if n not in LARGE_DATASETS]
    datasets, missing = {}, []
    for name in names:
        try:
            datasets[name] = _dataset(name, cfg)
        except DatasetError as exc:
            missing.append(name)
            logger.error("%s", exc)
    if not datasets:
        print("no datasets available", file=sys.stderr)
        return 1
    report = run_benchmark(datasets, args.approaches or sorted(APPROACHES), args.folds,
                           args.seed, cfg.params, args.workers or cfg.workers)
    for path in write_report(report, args.out_dir, args.formats):
        print(f"wrote {path}")
    if missing or report.failures:
        return EXIT_PARTIAL
    return 0


def cmd_yrand(args, cfg) -> int:
    ds = _dataset(args.dataset, cfg)
    shuffled = randomization_test(ds, args.approach, args.shuffles, args.shuffle_seed,
                                  args.folds, args.seed, cfg.params)
    for i, m in enumerate(shuffled):
        print(f"shuffle {i}: mean R^2 {m.r2:.4f}")
    print(f"mean shuffled R^2 {mean_metrics(shuffled).r2:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="topoqsar", description=__doc__)
    parser.add_argument("--config", help="INI configuration file")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fetch", help="download benchmark CSVs into the cache")
    p.add_argument("name", choices=[*sorted(DATASETS), "all"])
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("descriptors", help="compute descriptors for a SMILES CSV")
    p.add_argument("csv")
    p.add_argument("--smiles-col", default="smiles")
    p.add_argument("--target-col")
    p.add_argument("--blocks", nargs="+", choices=BLOCK_ORDER)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_descriptors)

    def cv_options(p):
        p.add_argument("--folds", type=int, default=None)
        p.add_argument("--seed", type=int, default=None, help="fold seed")

    p = sub.add_parser("run", help="cross-validate one approach on one dataset")
    p.add_argument("--dataset", required=True, choices=sorted(DATASETS))
    p.add_argument("--approach", required=True, type=int, choices=sorted(APPROACHES))
    cv_options(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("benchmark", help="run the dataset x approach grid and write reports")
    p.add_argument("--datasets", nargs="+", choices=sorted(DATASETS))
    p.add_argument("--approaches", nargs="+", type=int, choices=sorted(APPROACHES))
    p.add_argument("--skip-large", action="store_true",
                   help=f"leave out {', '.join(sorted(LARGE_DATASETS))}")
    p.add_argument("--out-dir", default="results")
    p.add_argument("--formats", nargs="+", default=["csv", "markdown", "json"],
                   choices=["csv", "markdown", "json"])
    p.add_argument("--workers", type=int, default=None)
    cv_options(p)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("yrand", help="Y-randomization test")
    p.add_argument("--dataset", required=True, choices=sorted(DATASETS))
    p.add_argument("--approach", required=True, type=int, choices=sorted(APPROACHES))
    p.add_argument("--shuffles", type=int, default=10)
    p.add_argument("--shuffle-seed", type=int, default=0)
    cv_options(p)
    p.set_defaults(func=cmd_yrand)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
    except (OSError, ValueError, configparser.Error) as exc:
        print(f"error: bad config {args.config}: {exc}", file=sys.stderr)
        return 1
    if getattr(args, "folds", None) is None and hasattr(args, "folds"):
        args.folds = cfg.folds
    if getattr(args, "seed", None) is None and hasattr(args, "seed"):
        args.seed = cfg.seed
    try:
        return args.func(args, cfg)
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
