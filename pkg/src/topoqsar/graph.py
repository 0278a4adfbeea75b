"""Shortest paths, eccentricities and the external/internal vertex split."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from topoqsar.smiles import Atom, Bond, BondOrder, Molecule, _assemble

__all__ = [
    "DisconnectedGraphError",
    "VertexPartition",
    "all_pairs_shortest_paths",
    "eccentricity_profile",
    "partition_vertices",
    "bfs_distances",
    "ring_basis",
    "molecule_from_edges",
]


def molecule_from_edges(n: int, edges, element: str = "C") -> Molecule:
    """Single-bonded skeleton on ``n`` atoms of one element (H counts are 0).

    Handy for evaluating indices on arbitrary graphs.
    """
    seen = set()
    bonds = []
    for u, v in edges:
        if u == v or not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"invalid edge ({u}, {v})")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ValueError(f"duplicate edge {key}")
        seen.add(key)
        bonds.append(Bond(u, v, BondOrder.SINGLE))
    return _assemble([Atom(element) for _ in range(n)], bonds)


class DisconnectedGraphError(ValueError):
    pass


@dataclass(frozen=True)
class VertexPartition:
    external: frozenset[int]
    internal: frozenset[int]


def bfs_distances(adjacency, n: int | None = None) -> np.ndarray:
    """All-pairs hop distances for an adjacency list; -1 marks unreachable."""
    n = len(adjacency) if n is None else n
    dist = np.full((n, n), -1, dtype=np.int64)
    for src in range(n):
        row = dist[src]
        row[src] = 0
        queue = deque([src])
        while queue:
            v = queue.popleft()
            dv = row[v] + 1
            for u in adjacency[v]:
                if row[u] < 0:
                    row[u] = dv
                    queue.append(u)
    return dist


def all_pairs_shortest_paths(mol: Molecule) -> np.ndarray:
    """Unweighted BFS distance matrix of a connected molecule.

    Bond orders are ignored. Raises DisconnectedGraphError naming the
    component sizes when the graph is not connected.
    """
    dist = bfs_distances(mol.adjacency, mol.n_atoms)
    if (dist < 0).any():
        sizes = sorted((len(c) for c in mol.components()), reverse=True)
        raise DisconnectedGraphError(
            f"molecule is disconnected (component sizes {sizes}); "
            "select the largest component first"
        )
    return dist


def eccentricity_profile(dm: np.ndarray) -> tuple[np.ndarray, int, int]:
    """Per-vertex eccentricity, diameter and radius."""
    ecc = dm.max(axis=1)
    return ecc, int(ecc.max()), int(ecc.min())


def partition_vertices(mol: Molecule) -> VertexPartition:
    external, internal = [], []
    for v, nbrs in enumerate(mol.adjacency):
        if len(nbrs) == 1:
            external.append(v)
        elif len(nbrs) >= 2:
            internal.append(v)
    return VertexPartition(frozenset(external), frozenset(internal))


def ring_basis(mol: Molecule) -> list[list[int]]:
    """Smallest set of smallest rings as lists of bond indices.

    Horton candidate cycles (shortest path from a root to both ends of an
    edge) are sorted by length and kept greedily while linearly independent
    over GF(2).
    """
    n = mol.n_atoms
    ring_bonds = [k for k, b in enumerate(mol.bonds) if b.in_ring]
    if not ring_bonds:
        return []
    ring_atoms = sorted({v for k in ring_bonds for v in mol.bonds[k].endpoints})
    target = len(ring_bonds) - len(ring_atoms) + len(_ring_components(mol, ring_bonds))
    bond_id = {}
    for k in ring_bonds:
        b = mol.bonds[k]
        bond_id[(b.begin, b.end)] = bond_id[(b.end, b.begin)] = k
    adj = [[] for _ in range(n)]
    for k in ring_bonds:
        b = mol.bonds[k]
        adj[b.begin].append(b.end)
        adj[b.end].append(b.begin)

    candidates = {}
    for root in ring_atoms:
        parent = {root: -1}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for u in adj[v]:
                if u not in parent:
                    parent[u] = v
                    queue.append(u)

        def path(x):
            verts, mask = [x], 0
            while parent[x] >= 0:
                mask |= 1 << bond_id[(x, parent[x])]
                x = parent[x]
                verts.append(x)
            return verts, mask

        for k in ring_bonds:
            b = mol.bonds[k]
            if b.begin not in parent or b.end not in parent:
                continue
            if parent[b.begin] == b.end or parent[b.end] == b.begin:
                continue
            pu, mu = path(b.begin)
            pv, mv = path(b.end)
            if set(pu) & set(pv) != {root}:
                continue
            mask = mu | mv | (1 << k)
            candidates.setdefault(mask, bin(mask).count("1"))

    basis_rows: dict[int, int] = {}  # pivot bit -> reduced row
    rings = []
    for mask, _ in sorted(candidates.items(), key=lambda kv: (kv[1], kv[0])):
        row = mask
        while row:
            pivot = row.bit_length() - 1
            if pivot not in basis_rows:
                basis_rows[pivot] = row
                rings.append([k for k in ring_bonds if mask >> k & 1])
                break
            row ^= basis_rows[pivot]
        if len(rings) == target:
            break
    return rings


def _ring_components(mol: Molecule, ring_bonds) -> list[set[int]]:
    comp = {}
    for k in ring_bonds:
        b = mol.bonds[k]
        a, c = comp.setdefault(b.begin, {b.begin}), comp.setdefault(b.end, {b.end})
        if a is not c:
            a |= c
            for v in c:
                comp[v] = a
    seen, out = set(), []
    for s in comp.values():
        if id(s) not in seen:
            seen.add(id(s))
            out.append(s)
    return out
