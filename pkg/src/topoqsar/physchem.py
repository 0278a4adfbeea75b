"""Physicochemical descriptors computed directly from the molecular graph."""

from __future__ import annotations

import logging
import math
from dataclasses import astuple, dataclass

from topoqsar._elements import ATOMIC_MASS, HYDROGEN_MASS
from topoqsar.graph import ring_basis
from topoqsar.smiles import BondOrder, Molecule

logger = logging.getLogger(__name__)

__all__ = [
    "PHYSCHEM_NAMES",
    "PhyschemDescriptors",
    "aromaticity_counts",
    "hbond_counts",
    "molecular_weight",
    "physchem_descriptors",
    "rotatable_bond_count",
    "tpsa",
]

PHYSCHEM_NAMES = ("mw", "tpsa", "hbd", "hba", "rot_bonds", "arom_atoms", "arom_rings", "heavy_atoms")


@dataclass(frozen=True)
class PhyschemDescriptors:
    mol_weight: float
    tpsa: float
    hbd: int
    hba: int
    rotatable_bonds: int
    aromatic_atoms: int
    aromatic_rings: int
    heavy_atoms: int

    def as_tuple(self) -> tuple:
        return astuple(self)


def molecular_weight(mol: Molecule) -> float:
    masses = []
    for atom in mol.atoms:
        try:
            masses.append(ATOMIC_MASS[atom.element])
        except KeyError:
            raise ValueError(f"no atomic mass for element {atom.element!r}") from None
        masses.append(HYDROGEN_MASS * atom.implicit_h)
    return math.fsum(masses)


def hbond_counts(mol: Molecule) -> tuple[int, int]:
    """Lipinski donors (N/O bearing H) and acceptors (all N/O)."""
    hbd = hba = 0
    for atom in mol.atoms:
        if atom.element in ("N", "O"):
            hba += 1
            if atom.implicit_h > 0:
                hbd += 1
    return hbd, hba


def _is_amide_cn(mol: Molecule, c: int, n: int) -> bool:
    if mol.atoms[c].element != "C" or mol.atoms[n].element != "N":
        return False
    for u in mol.adjacency[c]:
        b = mol.bond_between(c, u)
        if mol.atoms[u].element == "O" and b.order is BondOrder.DOUBLE:
            return True
    return False


def rotatable_bond_count(mol: Molecule) -> int:
    count = 0
    for b in mol.bonds:
        if b.order is not BondOrder.SINGLE or b.in_ring:
            continue
        if mol.degree(b.begin) < 2 or mol.degree(b.end) < 2:
            continue
        if _is_amide_cn(mol, b.begin, b.end) or _is_amide_cn(mol, b.end, b.begin):
            continue
        count += 1
    return count


# Ertl polar surface contributions (A^2) keyed by
# (element, H count, charge, n_single, n_double, n_triple, n_aromatic, in_3_ring);
# None in the last slot means ring membership does not matter.
_TPSA_TABLE: dict[tuple, float] = {
    ("N", 0, 0, 3, 0, 0, 0, False): 3.24,
    ("N", 0, 0, 1, 1, 0, 0, None): 12.36,
    ("N", 0, 0, 0, 0, 1, 0, None): 23.79,
    ("N", 0, 0, 1, 2, 0, 0, None): 11.68,
    ("N", 0, 0, 0, 1, 1, 0, None): 13.60,
    ("N", 0, 0, 3, 0, 0, 0, True): 3.01,
    ("N", 1, 0, 2, 0, 0, 0, False): 12.03,
    ("N", 1, 0, 2, 0, 0, 0, True): 21.94,
    ("N", 1, 0, 0, 1, 0, 0, None): 23.85,
    ("N", 2, 0, 1, 0, 0, 0, None): 26.02,
    ("N", 0, 1, 4, 0, 0, 0, None): 0.00,
    ("N", 0, 1, 2, 1, 0, 0, None): 3.01,
    ("N", 0, 1, 1, 0, 1, 0, None): 4.36,
    ("N", 1, 1, 3, 0, 0, 0, None): 4.44,
    ("N", 1, 1, 1, 1, 0, 0, None): 13.97,
    ("N", 2, 1, 2, 0, 0, 0, None): 16.61,
    ("N", 2, 1, 0, 1, 0, 0, None): 25.59,
    ("N", 3, 1, 1, 0, 0, 0, None): 27.64,
    ("N", 0, 0, 0, 0, 0, 2, None): 12.89,
    ("N", 0, 0, 0, 0, 0, 3, None): 4.41,
    ("N", 0, 0, 1, 0, 0, 2, None): 4.93,
    ("N", 0, 0, 0, 1, 0, 2, None): 8.39,
    ("N", 1, 0, 0, 0, 0, 2, None): 15.79,
    ("N", 0, 1, 0, 0, 0, 3, None): 4.10,
    ("N", 0, 1, 1, 0, 0, 2, None): 3.88,
    ("N", 1, 1, 0, 0, 0, 2, None): 14.14,
    ("O", 0, 0, 2, 0, 0, 0, False): 9.23,
    ("O", 0, 0, 2, 0, 0, 0, True): 12.53,
    ("O", 0, 0, 0, 1, 0, 0, None): 17.07,
    ("O", 1, 0, 1, 0, 0, 0, None): 20.23,
    ("O", 0, -1, 1, 0, 0, 0, None): 23.06,
    ("O", 0, 0, 0, 0, 0, 2, None): 13.14,
}


def _in_three_ring(mol: Molecule, v: int) -> bool:
    nbrs = mol.adjacency[v]
    return any(mol.bond_between(a, b) is not None for i, a in enumerate(nbrs) for b in nbrs[i + 1 :])


def _polar_environment(mol: Molecule, v: int) -> tuple:
    atom = mol.atoms[v]
    counts = {o: 0 for o in BondOrder}
    for u in mol.adjacency[v]:
        counts[mol.bond_between(v, u).order] += 1
    return (
        atom.element,
        atom.implicit_h,
        atom.formal_charge,
        counts[BondOrder.SINGLE],
        counts[BondOrder.DOUBLE],
        counts[BondOrder.TRIPLE],
        counts[BondOrder.AROMATIC],
    )


def _generic_contribution(element: str, heavy_neighbours: int, n_h: int) -> float:
    """Fallback for environments missing from the table, keyed only by
    neighbour and hydrogen counts."""
    if element == "N":
        value = 30.5 - 8.2 * heavy_neighbours + 1.5 * n_h
    else:
        value = 28.5 - 8.6 * heavy_neighbours + 1.5 * n_h
    return max(value, 0.0)


def tpsa(mol: Molecule) -> float:
    """Topological polar surface area over N and O atoms."""
    parts = []
    for v, atom in enumerate(mol.atoms):
        if atom.element not in ("N", "O"):
            continue
        env = _polar_environment(mol, v)
        value = _TPSA_TABLE.get(env + (None,))
        if value is None:
            value = _TPSA_TABLE.get(env + (_in_three_ring(mol, v),))
        if value is None:
            value = _generic_contribution(atom.element, mol.degree(v), atom.implicit_h)
            logger.warning("no TPSA entry for %s environment %s in %s; using %.2f",
                           atom.element, env[1:], mol.smiles or "<molecule>", value)
        parts.append(value)
    return math.fsum(parts)


def aromaticity_counts(mol: Molecule) -> tuple[int, int]:
    """Aromatic atom count and number of all-aromatic rings in the SSSR."""
    n_atoms = sum(1 for a in mol.atoms if a.aromatic)
    if n_atoms == 0:
        return 0, 0
    n_rings = sum(
        1 for ring in ring_basis(mol)
        if all(mol.bonds[k].order is BondOrder.AROMATIC for k in ring)
    )
    return n_atoms, n_rings


def physchem_descriptors(mol: Molecule) -> PhyschemDescriptors:
    hbd, hba = hbond_counts(mol)
    arom_atoms, arom_rings = aromaticity_counts(mol)
    return PhyschemDescriptors(
        mol_weight=molecular_weight(mol),
        tpsa=tpsa(mol),
        hbd=hbd,
        hba=hba,
        rotatable_bonds=rotatable_bond_count(mol),
        aromatic_atoms=arom_atoms,
        aromatic_rings=arom_rings,
        heavy_atoms=mol.n_atoms,
    )
