import csv
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


def write_weight_csv(path: Path, n: int = 120, start: int = 0) -> Path:
    """A small SMILES CSV whose target is the reference molecular weight."""
    with open(DATA / "rdkit_structures.csv") as fh:
        rows = list(csv.DictReader(fh))[start : start + n]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["smiles", "exp"])
        w.writerows((r["smiles"], r["mol_weight"]) for r in rows)
    return path


@pytest.fixture
def weight_csv(tmp_path):
    return write_weight_csv(tmp_path / "weights.csv")


@pytest.fixture(scope="session")
def weight_dataset(tmp_path_factory):
    from topoqsar.pipeline import load_dataset

    path = write_weight_csv(tmp_path_factory.mktemp("data") / "weights.csv", n=150)
    return load_dataset(path, "smiles", "exp", name="weights")


# criterion number -> (passed, detail), filled by test_acceptance.py
CRITERIA: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
