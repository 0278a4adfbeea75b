"""Benchmark dataset registry, CSV ingestion and download cache."""

from __future__ import annotations

import csv
import logging
import math
import os
import shutil
import tempfile
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path

from topoqsar.smiles import Molecule, validate_and_filter

logger = logging.getLogger(__name__)

__all__ = [
    "DatasetInfo",
    "Dataset",
    "DATASETS",
    "LARGE_DATASETS",
    "DatasetError",
    "cache_dir",
    "load_dataset",
    "fetch_dataset",
    "locate_dataset",
]

CACHE_ENV = "TOPOQSAR_CACHE"
_MOLECULENET = "https://deepchemdata.s3-us-west-1.amazonaws.com/datasets/"


class DatasetError(RuntimeError):
    pass


@dataclass(frozen=True)
class DatasetInfo:
    name: str
    filename: str
    smiles_column: str
    target_column: str
    target_label: str
    units: str
    expected_rows: int
    url: str | None = None


DATASETS = {
    "bace": DatasetInfo("bace", "bace.csv", "mol", "pIC50", "pIC50", "", 1513,
                        _MOLECULENET + "bace.csv"),
    "logp_synthetic": DatasetInfo("logp_synthetic", "logp_synthetic.csv", "smiles", "exp",
                                  "LogP", "", 14610),
    "logp_experimental": DatasetInfo("logp_experimental", "logp_experimental.csv", "smiles",
                                     "exp", "LogP", "", 753),
    "esol": DatasetInfo("esol", "delaney-processed.csv", "smiles",
                        "measured log solubility in mols per litre", "LogS", "log(mol/L)", 1128,
                        _MOLECULENET + "delaney-processed.csv"),
    "sampl": DatasetInfo("sampl", "SAMPL.csv", "smiles", "expt", "dG_hyd", "kcal/mol", 642,
                         _MOLECULENET + "SAMPL.csv"),
}
LARGE_DATASETS = frozenset({"logp_synthetic"})


@dataclass
class Dataset:
    name: str
    records: list[tuple[str, Molecule, float]]
    target_label: str = ""
    units: str = ""
    rejected: list[tuple[str, str]] = field(default_factory=list, repr=False)
    n_rows: int = 0

    def __len__(self) -> int:
        return len(self.records)

    @property
    def targets(self) -> list[float]:
        return [t for _, _, t in self.records]


def cache_dir() -> Path:
    root = os.environ.get(CACHE_ENV)
    path = Path(root) if root else Path.home() / ".cache" / "topoqsar"
    return path


def _info(name: str) -> DatasetInfo:
    try:
        return DATASETS[name]
    except KeyError:
        raise DatasetError(
            f"unknown dataset {name!r}; supported: {', '.join(sorted(DATASETS))}. "
            f"Other data can be loaded from a local CSV with load_dataset()"
        ) from None


def load_dataset(path, smiles_column: str | None = None, target_column: str | None = None,
                 name: str | None = None) -> Dataset:
    """Read a CSV with a header row and parse its SMILES.

    Column names default to the registry schema when ``name`` is a known
    dataset. Rows whose target is empty or not a finite number are rejected
    alongside unparsable SMILES.
    """
    path = Path(path)
    info = DATASETS.get(name) if name else None
    smiles_column = smiles_column or (info.smiles_column if info else "smiles")
    target_column = target_column or (info.target_column if info else None)
    if target_column is None:
        raise DatasetError("no target column given")
    if not path.is_file():
        raise DatasetError(f"dataset file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in (smiles_column, target_column):
            if col not in header:
                raise DatasetError(f"{path.name}: missing column {col!r} (have {header})")
        rows = [(r[smiles_column].strip(), r[target_column]) for r in reader]

    records, bad_target = [], []
    for smi, raw in rows:
        try:
            value = float(raw)
        except (TypeError, ValueError):
            value = math.nan
        if math.isfinite(value):
            records.append((smi, value))
        else:
            bad_target.append((smi, f"non-numeric target {raw!r}"))
    accepted, rejected = validate_and_filter(records)
    rejected = bad_target + rejected
    if not accepted:
        raise DatasetError(f"{path.name}: no valid rows")
    label = name or path.stem
    logger.info("%s: %d rows, %d accepted, %d rejected", label, len(rows), len(accepted),
                len(rejected))
    if info and len(rows) != info.expected_rows:
        logger.warning("%s: %d rows, expected %d", label, len(rows), info.expected_rows)
    return Dataset(label, accepted, info.target_label if info else target_column,
                   info.units if info else "", rejected, len(rows))


def locate_dataset(name: str, overrides: dict | None = None) -> Path:
    """Path of a dataset file: a configured override, else the cache."""
    info = _info(name)
    if overrides and overrides.get(name):
        return Path(overrides[name])
    return cache_dir() / info.filename


def fetch_dataset(name: str, overrides: dict | None = None, timeout: float = 60.0) -> Path:
    """Download ``name`` into the cache unless a non-empty copy exists."""
    path = locate_dataset(name, overrides)
    if path.is_file() and path.stat().st_size > 0:
        return path
    info = _info(name)
    if info.url is None:
        raise DatasetError(
            f"{name} has no download source; place the CSV at {path} or set its path "
            f"in the [paths] section of the config file"
        )
    path.parent.mkdir(parents=True, exist_ok=True)
    logger.info("downloading %s from %s", name, info.url)
    tmp_path = None
    try:
        with urllib.request.urlopen(info.url, timeout=timeout) as resp, \
                tempfile.NamedTemporaryFile(dir=path.parent, delete=False) as tmp:
            tmp_path = Path(tmp.name)
            shutil.copyfileobj(resp, tmp)
    except OSError as exc:
        if tmp_path is not None:
            tmp_path.unlink(missing_ok=True)
        raise DatasetError(f"download of {name} failed: {exc}; place the CSV at {path} "
                           f"to run offline") from exc
    if tmp_path.stat().st_size == 0:
        tmp_path.unlink()
        raise DatasetError(f"download of {name} returned an empty file")
    tmp_path.replace(path)
    return path
