"""Descriptor blocks assembled into feature matrices."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from topoqsar.fingerprint import fingerprint_names, morgan_fingerprint
from topoqsar.graph import all_pairs_shortest_paths
from topoqsar.indices import (
    ACTIVITY_NAMES,
    DEFAULT_IRREGULARITY,
    GRAPH_NAMES,
    activity_indices,
    classical_indices,
)
from topoqsar.ml.features import FeatureMatrix
from topoqsar.physchem import PHYSCHEM_NAMES, physchem_descriptors
from topoqsar.smiles import Molecule, largest_component

logger = logging.getLogger(__name__)

__all__ = ["BLOCK_ORDER", "DescriptorTable", "block_names", "describe", "featurize",
           "build_features"]

BLOCK_ORDER = ("activity", "graph", "physchem", "fingerprint")


def block_names(block: str, fp_width: int = 1024) -> tuple[str, ...]:
    if block == "activity":
        return ACTIVITY_NAMES
    if block == "graph":
        return GRAPH_NAMES
    if block == "physchem":
        return PHYSCHEM_NAMES
    if block == "fingerprint":
        return tuple(fingerprint_names(fp_width))
    raise ValueError(f"unknown descriptor block {block!r}; choose from {BLOCK_ORDER}")


def _ordered(blocks) -> list[str]:
    blocks = set(blocks)
    if not blocks:
        raise ValueError("at least one descriptor block is required")
    for b in blocks:
        block_names(b)
    return [b for b in BLOCK_ORDER if b in blocks]


def describe(mol: Molecule, blocks=BLOCK_ORDER, fp_width: int = 1024, fp_radius: int = 2,
             irregularity=DEFAULT_IRREGULARITY) -> list[float]:
    """Descriptor row for one molecule (its largest component)."""
    mol = largest_component(mol)
    row: list[float] = []
    dm = None
    for block in _ordered(blocks):
        if block in ("activity", "graph") and dm is None:
            dm = all_pairs_shortest_paths(mol)
        if block == "activity":
            a = activity_indices(mol, dm, t=irregularity)
            row += [a.D, a.zeta]
        elif block == "graph":
            row += list(classical_indices(mol, dm).as_tuple())
        elif block == "physchem":
            row += list(physchem_descriptors(mol).as_tuple())
        else:
            row += morgan_fingerprint(mol, fp_radius, fp_width).to_array().tolist()
    return row


@dataclass(frozen=True)
class DescriptorTable:
    """Feature matrix plus the targets and source rows it was built from."""

    features: FeatureMatrix
    targets: np.ndarray
    smiles: tuple[str, ...]
    record_index: np.ndarray
    dataset: str = ""

    def __len__(self) -> int:
        return len(self.targets)

    def select(self, names) -> "DescriptorTable":
        return DescriptorTable(self.features.select(names), self.targets, self.smiles,
                               self.record_index, self.dataset)

    def with_targets(self, targets) -> "DescriptorTable":
        return DescriptorTable(self.features, np.asarray(targets, dtype=np.float64),
                               self.smiles, self.record_index, self.dataset)


def featurize(dataset, blocks=BLOCK_ORDER, fp_width: int = 1024, fp_radius: int = 2,
              irregularity=DEFAULT_IRREGULARITY) -> DescriptorTable:
    """Compute the requested blocks for every record of ``dataset``.

    Molecules with any non-finite descriptor (e.g. a single-atom largest
    component, where density and Balaban J are undefined) are dropped and
    logged.
    """
    order = _ordered(blocks)
    names = [n for b in order for n in block_names(b, fp_width)]
    rows, targets, smiles, kept = [], [], [], []
    dropped = 0
    for i, (smi, mol, target) in enumerate(dataset.records):
        row = describe(mol, order, fp_width, fp_radius, irregularity)
        if not all(math.isfinite(v) for v in row):
            dropped += 1
            logger.info("%s: dropped %s (non-finite descriptors)", dataset.name, smi)
            continue
        rows.append(row)
        targets.append(target)
        smiles.append(smi)
        kept.append(i)
    if dropped:
        logger.warning("%s: %d molecule(s) dropped for non-finite descriptors",
                       dataset.name, dropped)
    values = np.array(rows, dtype=np.float64).reshape(len(rows), len(names))
    return DescriptorTable(FeatureMatrix(values, tuple(names)), np.array(targets, dtype=np.float64),
                           tuple(smiles), np.array(kept, dtype=np.int64), dataset.name)


def build_features(dataset, blocks, fp_width: int = 1024, fp_radius: int = 2,
                   irregularity=DEFAULT_IRREGULARITY) -> FeatureMatrix:
    return featurize(dataset, blocks, fp_width, fp_radius, irregularity).features
