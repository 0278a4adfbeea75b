"""External/internal activity indices and classical topological indices.

Every function here expects a connected, hydrogen-suppressed molecule with
at least two heavy atoms (see :func:`topoqsar.smiles.largest_component`).
"""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass
from typing import Callable

import numpy as np

from topoqsar.graph import (
    VertexPartition,
    all_pairs_shortest_paths,
    eccentricity_profile,
    partition_vertices,
)
from topoqsar.smiles import Molecule

__all__ = [
    "ACTIVITY_NAMES",
    "GRAPH_NAMES",
    "IRREGULARITY",
    "ActivityIndices",
    "GraphDescriptors",
    "activity_indices",
    "classical_indices",
    "irregularity",
    "score",
]

ACTIVITY_NAMES = ("D", "zeta")
GRAPH_NAMES = (
    "wiener",
    "zagreb_m1",
    "zagreb_m2",
    "randic",
    "balaban_j",
    "diameter",
    "radius",
    "density",
    "clustering",
)

IrregularityFn = Callable[[int, Molecule], float]


def degree_mismatch(v: int, mol: Molecule) -> float:
    """Number of neighbours whose degree differs from deg(v)."""
    dv = mol.degree(v)
    return float(sum(1 for u in mol.adjacency[v] if mol.degree(u) != dv))


def degree_deviation(v: int, mol: Molecule) -> float:
    """Sum of |deg(u) - deg(v)| over neighbours u."""
    dv = mol.degree(v)
    return float(sum(abs(mol.degree(u) - dv) for u in mol.adjacency[v]))


IRREGULARITY: dict[str, IrregularityFn] = {
    "degree_mismatch": degree_mismatch,
    "degree_deviation": degree_deviation,
}
DEFAULT_IRREGULARITY = "degree_mismatch"


def irregularity(name: str | IrregularityFn = DEFAULT_IRREGULARITY) -> IrregularityFn:
    if callable(name):
        return name
    try:
        return IRREGULARITY[name]
    except KeyError:
        raise ValueError(
            f"unknown irregularity strategy {name!r}; choose from {sorted(IRREGULARITY)}"
        ) from None


@dataclass(frozen=True)
class ActivityIndices:
    D: float
    zeta: float
    n: int


@dataclass(frozen=True)
class GraphDescriptors:
    wiener: float
    zagreb_m1: float
    zagreb_m2: float
    randic: float
    balaban_j: float
    diameter: int
    radius: int
    density: float
    clustering: float

    def as_tuple(self) -> tuple:
        return astuple(self)


def score(
    v: int,
    mol: Molecule,
    dm: np.ndarray,
    partition: VertexPartition,
    t: str | IrregularityFn = DEFAULT_IRREGULARITY,
    ecc: np.ndarray | None = None,
) -> float:
    """Vertex score: distance sum to the external vertices for an external
    ``v``; ``t(v) / deg(v) * ecc(v)`` for an internal ``v``."""
    if v in partition.external:
        return float(sum(int(dm[u, v]) for u in partition.external))
    if v in partition.internal:
        e = int(dm[v].max()) if ecc is None else int(ecc[v])
        return irregularity(t)(v, mol) / mol.degree(v) * e
    return 0.0


def activity_indices(
    mol: Molecule,
    dm: np.ndarray | None = None,
    partition: VertexPartition | None = None,
    t: str | IrregularityFn = DEFAULT_IRREGULARITY,
) -> ActivityIndices:
    if dm is None:
        dm = all_pairs_shortest_paths(mol)
    if partition is None:
        partition = partition_vertices(mol)
    n = mol.n_atoms
    ecc = dm.max(axis=1)
    t_fn = irregularity(t)
    ext = sorted(partition.external)
    if ext:
        sub = dm[np.ix_(ext, ext)]
        d_sum = float(sub.sum())
    else:
        d_sum = 0.0
    z_sum = math.fsum(t_fn(v, mol) / mol.degree(v) * int(ecc[v]) for v in partition.internal)
    return ActivityIndices(D=d_sum / n**3, zeta=z_sum / n**2, n=n)


def classical_indices(mol: Molecule, dm: np.ndarray | None = None) -> GraphDescriptors:
    if dm is None:
        dm = all_pairs_shortest_paths(mol)
    n = mol.n_atoms
    m = mol.n_bonds
    deg = np.array(mol.degrees(), dtype=np.float64)
    edges = np.array([(b.begin, b.end) for b in mol.bonds], dtype=np.int64).reshape(-1, 2)
    du, dv = deg[edges[:, 0]], deg[edges[:, 1]]

    # integer sums are exact; real ones use fsum so atom order cannot change the last bit
    wiener = float(np.triu(dm, 1).sum())
    m1 = float((deg**2).sum())
    m2 = float((du * dv).sum())
    randic = math.fsum(1.0 / np.sqrt(du * dv)) if m else 0.0

    dist_sum = dm.sum(axis=1).astype(np.float64)
    mu = m - n + 1
    balaban = (
        m / (mu + 1) * math.fsum(1.0 / np.sqrt(dist_sum[edges[:, 0]] * dist_sum[edges[:, 1]]))
        if m
        else math.nan
    )
    _, diameter, radius = eccentricity_profile(dm)
    density = 2.0 * m / (n * (n - 1)) if n > 1 else math.nan

    nbr_sets = [set(a) for a in mol.adjacency]
    local = []
    for v, nbrs in enumerate(mol.adjacency):
        k = len(nbrs)
        if k < 2:
            local.append(0.0)
            continue
        links = sum(1 for i, a in enumerate(nbrs) for b in nbrs[i + 1 :] if b in nbr_sets[a])
        local.append(2.0 * links / (k * (k - 1)))
    clustering = math.fsum(local) / n

    return GraphDescriptors(
        wiener=wiener,
        zagreb_m1=m1,
        zagreb_m2=m2,
        randic=randic,
        balaban_j=balaban,
        diameter=diameter,
        radius=radius,
        density=density,
        clustering=clustering,
    )
