import csv
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topoqsar.smiles import (
    BondOrder,
    SmilesError,
    largest_component,
    parse_smiles,
    validate_and_filter,
)

DATA = Path(__file__).parent / "data"
VALENCES = {"B": (3,), "C": (4,), "N": (3, 5), "O": (2,), "P": (3, 5), "S": (2, 4, 6),
            "F": (1,), "Cl": (1,), "Br": (1,), "I": (1, 3, 5)}


def structures():
    with open(DATA / "rdkit_structures.csv") as fh:
        return list(csv.DictReader(fh))


def test_ethanol():
    mol = parse_smiles("CCO")
    assert mol.n_atoms == 3
    assert [b.order for b in mol.bonds] == [BondOrder.SINGLE] * 2
    assert [a.implicit_h for a in mol.atoms] == [3, 2, 1]


def test_benzene_is_an_aromatic_ring():
    mol = parse_smiles("c1ccccc1")
    assert mol.n_atoms == 6 and mol.n_bonds == 6
    assert all(a.aromatic and a.in_ring and a.implicit_h == 1 for a in mol.atoms)
    assert all(b.order == BondOrder.AROMATIC and b.in_ring for b in mol.bonds)


def test_cyclopropane_ring_flags():
    mol = parse_smiles("C1CC1")
    assert mol.n_atoms == 3 and mol.n_bonds == 3
    assert all(b.in_ring for b in mol.bonds)


@pytest.mark.parametrize(
    "smiles, fragment",
    [
        ("C(", "parenthes"),
        ("C)", "parenthes"),
        ("C1CC", "ring"),
        ("CXC", "element"),
        ("C(C)(C)(C)(C)C", "valence"),
        ("[C", "bracket"),
        ("", "empty"),
    ],
)
def test_malformed_input_is_reported_with_position(smiles, fragment):
    with pytest.raises(SmilesError) as info:
        parse_smiles(smiles)
    assert fragment in str(info.value).lower()
    assert info.value.position >= 0


def test_two_digit_ring_closures():
    a = parse_smiles("C%10CCCCC%10")
    b = parse_smiles("C1CCCCC1")
    assert a.n_bonds == b.n_bonds == 6
    assert all(bond.in_ring for bond in a.bonds)


def test_bracket_atoms():
    mol = parse_smiles("[NH4+]")
    assert mol.atoms[0].formal_charge == 1 and mol.atoms[0].implicit_h == 4
    mol = parse_smiles("C[N+](C)(C)C")
    assert mol.atoms[1].implicit_h == 0
    mol = parse_smiles("[13CH3]O")
    assert mol.atoms[0].implicit_h == 3
    mol = parse_smiles("[O-]C(=O)C")
    assert mol.atoms[0].implicit_h == 0 and mol.atoms[0].formal_charge == -1
    mol = parse_smiles("c1cc[nH]c1")
    assert [a.implicit_h for a in mol.atoms] == [1, 1, 1, 1, 1]


def test_stereo_marks_are_ignored():
    a = parse_smiles("F/C=C/F")
    b = parse_smiles("FC=CF")
    assert a == b
    chiral, plain = parse_smiles("N[C@@H](C)C(=O)O"), parse_smiles("NC(C)C(=O)O")
    assert [(a.element, a.implicit_h, a.formal_charge) for a in chiral.atoms] == \
        [(a.element, a.implicit_h, a.formal_charge) for a in plain.atoms]
    assert chiral.bonds == plain.bonds


def test_explicit_hydrogen_atoms_fold_into_counts():
    mol = parse_smiles("[H]C([H])([H])[H]")
    assert mol.n_atoms == 1 and mol.atoms[0].implicit_h == 4


def test_validate_and_filter():
    accepted, rejected = validate_and_filter([("CCO", 1.0), ("C((", 2.0)])
    assert len(accepted) == 1 and len(rejected) == 1
    assert "parenthes" in rejected[0][1].lower()
    accepted, rejected = validate_and_filter([("C", 0.5)])
    assert not accepted and "too small" in rejected[0][1]


def test_salt_keeps_largest_component():
    accepted, _ = validate_and_filter([("[Na+].[Cl-]", 0.0)])
    (smi, mol, _), = accepted
    assert len(mol.components()) == 2
    assert largest_component(mol).n_atoms == 1
    mol = parse_smiles("CCO.[Na+]")
    assert [a.element for a in largest_component(mol).atoms] == ["C", "C", "O"]


def test_round_trip_stability():
    for row in structures()[:100]:
        assert parse_smiles(row["smiles"]) == parse_smiles(row["smiles"])


def test_matches_rdkit_reference_structures():
    # atom/bond counts, hydrogens, aromaticity and ring membership recorded from RDKit
    for row in structures():
        mol = parse_smiles(row["smiles"])
        got = (
            mol.n_atoms,
            mol.n_bonds,
            sum(a.implicit_h for a in mol.atoms),
            sum(a.aromatic for a in mol.atoms),
            sum(a.in_ring for a in mol.atoms),
            sum(b.in_ring for b in mol.bonds),
        )
        want = tuple(int(row[k]) for k in ("atoms", "bonds", "hydrogens", "aromatic_atoms",
                                            "ring_atoms", "ring_bonds"))
        assert got == want, row["smiles"]


def _bond_valence(mol, v):
    return sum(mol.bond_between(v, u).order.valence for u in mol.adjacency[v])


def test_implicit_hydrogen_conservation():
    # aromatic bonds count 1.5 and the sum is rounded (half to even) before subtracting
    checked = 0
    for row in structures():
        mol = parse_smiles(row["smiles"])
        for v, a in enumerate(mol.atoms):
            if a.bracket or a.formal_charge or a.element not in VALENCES:
                continue
            total = round(_bond_valence(mol, v))
            if a.aromatic:
                if a.element != "C":
                    continue  # pyrrole-type heteroatoms carry no H without brackets
                assert a.implicit_h == max(0, 4 - total), (row["smiles"], v)
            else:
                target = min((x for x in VALENCES[a.element] if x >= total), default=total)
                assert total + a.implicit_h == target, (row["smiles"], v)
            checked += 1
    assert checked > 5000


def _brute_force_in_ring(mol, k):
    # a bond lies on a cycle iff its endpoints stay connected without it
    b = mol.bonds[k]
    seen, stack = {b.begin}, [b.begin]
    while stack:
        v = stack.pop()
        for u in mol.adjacency[v]:
            if {v, u} == {b.begin, b.end}:
                continue
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return b.end in seen


def test_ring_flags_equal_bridge_brute_force():
    n = 0
    for row in structures():
        mol = parse_smiles(row["smiles"])
        if mol.n_atoms > 20:
            continue
        n += 1
        for k, bond in enumerate(mol.bonds):
            assert bond.in_ring == _brute_force_in_ring(mol, k), row["smiles"]
        for v, atom in enumerate(mol.atoms):
            assert atom.in_ring == any(mol.bond_between(v, u).in_ring for u in mol.adjacency[v])
    assert n > 100


def test_adjacency_is_symmetric_and_simple():
    for row in structures()[:200]:
        mol = parse_smiles(row["smiles"])
        pairs = [frozenset(b.endpoints) for b in mol.bonds]
        assert len(set(pairs)) == len(pairs)
        for v, nbrs in enumerate(mol.adjacency):
            assert v not in nbrs
            for u in nbrs:
                assert v in mol.adjacency[u]
        assert sum(len(n) for n in mol.adjacency) == 2 * mol.n_bonds


def test_aromatic_bonds_join_aromatic_atoms():
    for row in structures():
        mol = parse_smiles(row["smiles"])
        for b in mol.bonds:
            if b.order == BondOrder.AROMATIC:
                assert mol.atoms[b.begin].aromatic and mol.atoms[b.end].aromatic


# random acyclic skeletons written from every possible root give the same molecule
@st.composite
def trees(draw):
    n = draw(st.integers(2, 12))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    elements = [draw(st.sampled_from(["C", "C", "C", "N", "O"])) for _ in range(n)]
    return elements, parents


def _write(elements, adj, root):
    def rec(v, parent):
        kids = [u for u in adj[v] if u != parent]
        s = elements[v]
        for u in kids[:-1]:
            s += "(" + rec(u, v) + ")"
        if kids:
            s += rec(kids[-1], v)
        return s

    return rec(root, None)


@settings(max_examples=60, deadline=None)
@given(trees())
def test_spelling_from_any_root_gives_same_counts(tree):
    elements, parents = tree
    n = len(elements)
    adj = [[] for _ in range(n)]
    for child, parent in enumerate(parents, start=1):
        adj[child].append(parent)
        adj[parent].append(child)
    # keep valences legal: O at most 2 neighbours, N at most 3
    for v in range(n):
        if elements[v] == "O" and len(adj[v]) > 2 or elements[v] == "N" and len(adj[v]) > 3:
            elements[v] = "C"
    if any(len(a) > 4 for a in adj):
        return
    profiles = set()
    for root in range(n):
        mol = parse_smiles(_write(elements, adj, root))
        profiles.add(tuple(sorted((a.element, a.implicit_h, mol.degree(i))
                                  for i, a in enumerate(mol.atoms))))
    assert len(profiles) == 1
