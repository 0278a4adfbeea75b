"""Morgan (ECFP-style) circular fingerprints folded to a fixed width.

Bit positions are produced by a seeded SplitMix64 mixer, so they are stable
across processes and platforms but do not coincide with RDKit's.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from topoqsar._elements import ATOMIC_NUMBER
from topoqsar.smiles import Molecule

__all__ = ["Fingerprint", "morgan_fingerprint", "hash_sequence", "fingerprint_names"]

_MASK = (1 << 64) - 1
SEED = 0x5EED_0F_C0DE_2024


def _mix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def hash_sequence(values, seed: int = SEED) -> int:
    h = seed
    for v in values:
        h = _mix64(h ^ (int(v) & _MASK))
    return h


@dataclass(frozen=True)
class Fingerprint:
    on_bits: tuple[int, ...]
    width: int
    radius: int

    @property
    def popcount(self) -> int:
        return len(self.on_bits)

    def to_array(self, dtype=np.uint8) -> np.ndarray:
        out = np.zeros(self.width, dtype=dtype)
        out[list(self.on_bits)] = 1
        return out


def fingerprint_names(width: int) -> list[str]:
    return [f"fp_{i}" for i in range(width)]


def _initial_code(mol: Molecule, v: int) -> int:
    a = mol.atoms[v]
    return hash_sequence(
        (ATOMIC_NUMBER[a.element], mol.degree(v), a.formal_charge, a.implicit_h,
         int(a.in_ring), int(a.aromatic))
    )


def morgan_fingerprint(mol: Molecule, radius: int = 2, width: int = 1024) -> Fingerprint:
    """Fold every atom environment up to ``radius`` bonds into ``width`` bits.

    An atom whose environment stops growing (no new bonds reachable) keeps
    its previous code, so it cannot set additional bits.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if width <= 0 or width & (width - 1):
        raise ValueError("width must be a power of two")
    n = mol.n_atoms
    codes = [_initial_code(mol, v) for v in range(n)]
    bits = {c % width for c in codes}
    bond_bit = {}
    for k, b in enumerate(mol.bonds):
        bond_bit[(b.begin, b.end)] = bond_bit[(b.end, b.begin)] = (1 << k, int(b.order))
    coverage = [0] * n
    for _ in range(radius):
        new_codes, new_cov = [], []
        for v in range(n):
            cov = coverage[v]
            env = []
            for u in mol.adjacency[v]:
                mask, order = bond_bit[(v, u)]
                cov |= coverage[u] | mask
                env.append((order, codes[u]))
            new_cov.append(cov)
            if cov == coverage[v]:
                new_codes.append(codes[v])
                continue
            env.sort()
            flat = [codes[v]]
            for order, code in env:
                flat.extend((order, code))
            new_codes.append(hash_sequence(flat))
        codes, coverage = new_codes, new_cov
        bits.update(c % width for c in codes)
    return Fingerprint(tuple(sorted(bits)), width, radius)
