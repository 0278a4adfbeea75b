"""Writers for benchmark results: CSV tables, a markdown summary and JSON."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from topoqsar.pipeline import published
from topoqsar.pipeline.approaches import APPROACHES
from topoqsar.pipeline.benchmark import TOP_FEATURES, EvalReport

__all__ = ["write_report", "load_report", "RESULTS_HEADER", "FORMATS"]

RESULTS_HEADER = ("dataset", "approach", "fold", "r2", "rmse", "mae", "mse")
FORMATS = ("csv", "markdown", "json")


def _num(x: float) -> str:
    return repr(float(x))


def _write_csv(path: Path, header, rows) -> Path:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def _results_rows(report: EvalReport):
    for (ds, a), cell in sorted(report.cells.items()):
        if not cell.ok:
            continue
        for f, m in enumerate(cell.folds):
            yield ds, a, f, _num(m.r2), _num(m.rmse), _num(m.mae), _num(m.mse)
        m = cell.mean
        yield ds, a, "mean", _num(m.r2), _num(m.rmse), _num(m.mae), _num(m.mse)


def _progression_rows(report: EvalReport):
    for (ds, a), cell in sorted(report.cells.items()):
        if not cell.ok:
            continue
        lo, hi = cell.r2_ci()
        yield ds, a, APPROACHES[a].name, _num(cell.mean.r2), _num(lo), _num(hi)


def _importance_rows(report: EvalReport):
    for (ds, a), cell in sorted(report.cells.items()):
        for rank, (name, imp) in enumerate(cell.importances[:TOP_FEATURES], start=1):
            yield ds, a, name, _num(imp), rank


def _fmt(x: float, digits: int = 2) -> str:
    return "n/a" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.{digits}f}"


def _fmt_p(p: float) -> str:
    return "<0.0001" if p < 1e-4 else f"{p:.4f}"


def _markdown(report: EvalReport) -> str:
    ds_list = report.datasets
    out = ["# Benchmark summary", "",
           f"{report.k}-fold cross-validation, fold seed {report.seed}. "
           "R^2 is the mean of per-fold values.", ""]

    out += ["## R^2 by approach", "",
            "| Approach | " + " | ".join(ds_list) + " |",
            "|---|" + "---|" * len(ds_list)]
    for a in report.approaches:
        cells = []
        for ds in ds_list:
            v = _fmt(report.mean_r2(ds, a))
            cells.append(f"**{v}**" if report.best.get(ds) == a else v)
        out.append(f"| {a}. {APPROACHES[a].name} | " + " | ".join(cells) + " |")
    out.append("")

    out += ["## Best result per dataset", "",
            "| Dataset | Baseline R^2 | Best R^2 | Best approach | Improvement |",
            "|---|---|---|---|---|"]
    for ds in ds_list:
        if ds not in report.best:
            continue
        b = report.best[ds]
        imp = report.improvement.get(ds)
        out.append(f"| {ds} | {_fmt(report.mean_r2(ds, 1))} | {_fmt(report.mean_r2(ds, b))} | "
                   f"{b}. {APPROACHES[b].name} | {_fmt(imp, 0) + '%' if imp is not None else 'n/a'} |")
    out.append("")

    out += ["## Significance of the best approach versus the baseline", "",
            "| Dataset | Baseline R^2 (95% CI) | Best R^2 (95% CI) | t | p |",
            "|---|---|---|---|---|"]
    for ds in ds_list:
        b = report.best.get(ds)
        sig = report.significance.get(ds, {}).get(b)
        if sig is None:
            continue
        base, best = report.cell(ds, 1), report.cell(ds, b)
        bl, bh = base.r2_ci()
        tl, th = best.r2_ci()
        note = " (zero-variance differences)" if sig.degenerate else ""
        out.append(f"| {ds} | {_fmt(base.mean.r2)} [{_fmt(bl)}, {_fmt(bh)}] | "
                   f"{_fmt(best.mean.r2)} [{_fmt(tl)}, {_fmt(th)}] | {sig.t_stat:.2f} | "
                   f"{_fmt_p(sig.p_value)}{note} |")
    out.append("")

    out += ["## Every approach versus the baseline (paired t-test on fold R^2)", "",
            "| Dataset | Approach | mean diff | t | p |", "|---|---|---|---|---|"]
    for ds in ds_list:
        for a, sig in sorted(report.significance.get(ds, {}).items()):
            out.append(f"| {ds} | {a} | {sig.mean_diff:+.3f} | {sig.t_stat:.2f} | "
                       f"{_fmt_p(sig.p_value)} |")
    out.append("")

    out += [f"## External models ({published.LABEL})", "",
            "GCN values used the same 5-fold protocol; the others used an 80/20 split.", "",
            "| Dataset | Best here | GCN | GNN+PGM | GNN | ChemBERTa |",
            "|---|---|---|---|---|---|"]
    for ds in ds_list:
        pub = report.published.get(ds, {})
        b = report.best.get(ds)
        row = [_fmt(report.mean_r2(ds, b)) if b else "n/a"]
        row += [_fmt(pub.get(m)) for m in ("GCN", "GNN+PGM", "GNN", "ChemBERTa")]
        out.append(f"| {ds} | " + " | ".join(row) + " |")
    out.append("")

    failures = report.failures
    if failures:
        out += ["## Failed cells", ""]
        out += [f"- {c.dataset} / approach {c.approach}: {c.error}" for c in failures]
        out.append("")

    out += ["## Timings (seconds)", "", "| Dataset | descriptors | " +
            " | ".join(str(a) for a in report.approaches) + " |",
            "|---|---|" + "---|" * len(report.approaches)]
    for ds in ds_list:
        times = [f"{report.cell(ds, a).seconds:.1f}" for a in report.approaches]
        out.append(f"| {ds} | {report.featurize_seconds.get(ds, 0.0):.1f} | "
                   + " | ".join(times) + " |")
    out.append("")
    return "\n".join(out)


def write_report(report: EvalReport, out_dir, formats=FORMATS) -> list[Path]:
    """Write the requested formats into ``out_dir`` and return the paths.

    csv: results.csv, progression.csv, importances.csv; markdown:
    summary.md; json: report.json.
    """
    if not report.cells:
        raise ValueError("report is empty")
    unknown = set(formats) - set(FORMATS)
    if unknown:
        raise ValueError(f"unknown report formats {sorted(unknown)}")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    paths = []
    if "csv" in formats:
        paths.append(_write_csv(out / "results.csv", RESULTS_HEADER, _results_rows(report)))
        paths.append(_write_csv(out / "progression.csv",
                                ("dataset", "approach", "name", "mean_r2", "ci_low", "ci_high"),
                                _progression_rows(report)))
        paths.append(_write_csv(out / "importances.csv",
                                ("dataset", "approach", "feature", "importance", "rank"),
                                _importance_rows(report)))
    if "markdown" in formats:
        path = out / "summary.md"
        path.write_text(_markdown(report), encoding="utf-8")
        paths.append(path)
    if "json" in formats:
        path = out / "report.json"
        path.write_text(json.dumps(report.to_dict(), indent=1), encoding="utf-8")
        paths.append(path)
    return paths


def load_report(path) -> EvalReport:
    return EvalReport.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
