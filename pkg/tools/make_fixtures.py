"""Regenerate the frozen oracle fixtures in tests/data.

Needs RDKit, which is only a development tool here. The TPSA reference
values are the ones RDKit ships from Ertl's own tpsa.c program, so they
are independent of both RDKit's and this package's implementation.
"""

import csv
import os
from pathlib import Path

import rdkit
from rdkit import Chem
from rdkit.Chem import Descriptors, rdMolDescriptors

OUT = Path(__file__).resolve().parents[1] / "tests" / "data"
NCI = Path(os.path.dirname(rdkit.__file__)) / "Data" / "NCI"


def tpsa_fixture(step=10):
    rows = []
    with open(NCI / "first_5k.tpsa.csv") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    for i, line in enumerate(lines):
        if i % step:
            continue
        smi, value = line.strip().rsplit(",", 1)
        mol = Chem.MolFromSmiles(smi)
        if mol is None:
            continue
        rows.append((Chem.MolToSmiles(mol), value))
    with open(OUT / "ertl_tpsa.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["smiles", "tpsa"])
        w.writerows(rows)


def structure_fixture(limit=600):
    rows = []
    with open(NCI / "first_5K.smi") as fh:
        for line in fh:
            mol = Chem.MolFromSmiles(line.split()[0])
            if mol is None or len(Chem.GetMolFrags(mol)) > 1:
                continue
            ri = mol.GetRingInfo()
            rows.append((
                Chem.MolToSmiles(mol),
                mol.GetNumAtoms(),
                mol.GetNumBonds(),
                sum(a.GetTotalNumHs() for a in mol.GetAtoms()),
                sum(a.GetIsAromatic() for a in mol.GetAtoms()),
                sum(ri.NumAtomRings(a.GetIdx()) > 0 for a in mol.GetAtoms()),
                sum(ri.NumBondRings(b.GetIdx()) > 0 for b in mol.GetBonds()),
                rdMolDescriptors.CalcNumAromaticRings(mol),
                f"{Descriptors.MolWt(mol):.4f}",
            ))
            if len(rows) == limit:
                break
    with open(OUT / "rdkit_structures.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["smiles", "atoms", "bonds", "hydrogens", "aromatic_atoms", "ring_atoms",
                    "ring_bonds", "aromatic_rings", "mol_weight"])
        w.writerows(rows)


def respelling_fixture(count=60, step=10):
    # RDKit's randomized writer starts from random atoms and renumbers ring closures
    with open(OUT / "rdkit_structures.csv") as fh:
        smiles = [row["smiles"] for row in csv.DictReader(fh)][::step][:count]
    rows = []
    for i, smi in enumerate(smiles):
        mol = Chem.MolFromSmiles(smi)
        (alt,) = Chem.MolToRandomSmilesVect(mol, 1, randomSeed=1000 + i)
        rows.append((smi, alt))
    with open(OUT / "respellings.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["smiles", "respelled"])
        w.writerows(rows)


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    tpsa_fixture()
    structure_fixture()
    respelling_fixture()
