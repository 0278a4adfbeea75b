"""SMILES parsing into hydrogen-suppressed molecular graphs.

Only the subset of OpenSMILES found in property-prediction benchmarks is
supported: organic-subset and bracket atoms, branches, ring closures
(including ``%nn``), explicit bond symbols, aromatic lowercase atoms and
disconnected components. Stereo marks and isotopes are read and dropped.
Hydrogens never become graph vertices; they are stored as per-atom counts.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from topoqsar._elements import ATOMIC_NUMBER

logger = logging.getLogger(__name__)

__all__ = [
    "Atom",
    "Bond",
    "BondOrder",
    "Molecule",
    "SmilesError",
    "parse_smiles",
    "largest_component",
    "validate_and_filter",
]


class SmilesError(ValueError):
    """Raised for malformed SMILES; carries the character offset."""

    def __init__(self, message: str, smiles: str, position: int):
        self.reason = message
        self.smiles = smiles
        self.position = position
        super().__init__(f"{message} at position {position} in {smiles!r}")


class BondOrder(enum.IntEnum):
    SINGLE = 1
    DOUBLE = 2
    TRIPLE = 3
    AROMATIC = 4

    @property
    def valence(self) -> float:
        return 1.5 if self is BondOrder.AROMATIC else float(self.value)


@dataclass(frozen=True)
class Atom:
    element: str
    formal_charge: int = 0
    aromatic: bool = False
    implicit_h: int = 0
    in_ring: bool = False
    bracket: bool = False


@dataclass(frozen=True)
class Bond:
    begin: int
    end: int
    order: BondOrder
    in_ring: bool = False

    @property
    def endpoints(self) -> tuple[int, int]:
        return (self.begin, self.end)


@dataclass(frozen=True)
class Molecule:
    """Immutable heavy-atom graph.

    ``adjacency[i]`` lists the neighbours of atom ``i`` in ascending order.
    """

    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...]
    adjacency: tuple[tuple[int, ...], ...]
    smiles: str = field(default="", compare=False)
    _bond_index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for k, b in enumerate(self.bonds):
            index[(b.begin, b.end)] = k
            index[(b.end, b.begin)] = k
        object.__setattr__(self, "_bond_index", index)

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def n_bonds(self) -> int:
        return len(self.bonds)

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def degrees(self) -> list[int]:
        return [len(nbrs) for nbrs in self.adjacency]

    def bond_between(self, i: int, j: int) -> Bond | None:
        k = self._bond_index.get((i, j))
        return None if k is None else self.bonds[k]

    def total_h(self, i: int) -> int:
        return self.atoms[i].implicit_h

    def components(self) -> list[list[int]]:
        """Connected components as sorted atom-index lists, in order of
        their lowest atom index."""
        seen = [False] * self.n_atoms
        comps = []
        for start in range(self.n_atoms):
            if seen[start]:
                continue
            seen[start] = True
            stack, comp = [start], []
            while stack:
                v = stack.pop()
                comp.append(v)
                for u in self.adjacency[v]:
                    if not seen[u]:
                        seen[u] = True
                        stack.append(u)
            comps.append(sorted(comp))
        return comps

    def subgraph(self, indices: Sequence[int]) -> "Molecule":
        keep = sorted(indices)
        remap = {old: new for new, old in enumerate(keep)}
        atoms = tuple(self.atoms[i] for i in keep)
        bonds = tuple(
            Bond(remap[b.begin], remap[b.end], b.order, b.in_ring)
            for b in self.bonds
            if b.begin in remap and b.end in remap
        )
        return _assemble(atoms, bonds, self.smiles)


# Default valences for organic-subset atoms, smallest first.
_ORGANIC_VALENCES = {
    "B": (3,),
    "C": (4,),
    "N": (3, 5),
    "O": (2,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "F": (1,),
    "Cl": (1,),
    "Br": (1,),
    "I": (1, 3, 5),
}
_AROMATIC_ORGANIC = {"b": "B", "c": "C", "n": "N", "o": "O", "p": "P", "s": "S"}
_AROMATIC_BRACKET = {**_AROMATIC_ORGANIC, "se": "Se", "as": "As", "te": "Te"}
_BOND_SYMBOLS = {
    "-": BondOrder.SINGLE,
    "=": BondOrder.DOUBLE,
    "#": BondOrder.TRIPLE,
    ":": BondOrder.AROMATIC,
    "/": BondOrder.SINGLE,
    "\\": BondOrder.SINGLE,
}


@dataclass
class _ProtoAtom:
    element: str
    aromatic: bool
    bracket: bool
    charge: int = 0
    hcount: int = 0
    position: int = 0


def _allowed_valences(element: str, charge: int) -> tuple[int, ...] | None:
    base = _ORGANIC_VALENCES.get(element)
    if base is None:
        return None
    if charge == 0:
        return base
    if element in ("N", "O", "P", "S"):
        return tuple(v + charge for v in base if v + charge >= 0)
    if element in ("C", "B"):
        # carbocation/carbanion: 3; borate: 4
        return (3,) if element == "C" else (3 - charge,)
    return None


class _Parser:
    def __init__(self, smiles: str):
        self.s = smiles
        self.atoms: list[_ProtoAtom] = []
        self.bonds: dict[tuple[int, int], BondOrder] = {}

    def error(self, message: str, pos: int):
        raise SmilesError(message, self.s, pos)

    def parse(self):
        s = self.s
        n = len(s)
        prev: int | None = None
        branches: list[tuple[int, int]] = []
        rings: dict[int, tuple[int, str | None, int]] = {}
        pending: tuple[str, int] | None = None
        i = 0
        while i < n:
            ch = s[i]
            if ch == "(":
                if prev is None:
                    self.error("branch opened before any atom", i)
                if pending is not None:
                    self.error("bond symbol before branch", pending[1])
                branches.append((prev, i))
                i += 1
            elif ch == ")":
                if not branches:
                    self.error("unbalanced parentheses: unexpected ')'", i)
                if pending is not None:
                    self.error("dangling bond symbol", pending[1])
                if s[i - 1] == "(":
                    self.error("empty branch", i)
                prev = branches.pop()[0]
                i += 1
            elif ch in _BOND_SYMBOLS or ch == "$":
                if ch == "$":
                    self.error("quadruple bonds are not supported", i)
                if pending is not None:
                    self.error("consecutive bond symbols", i)
                if prev is None:
                    self.error("bond symbol without a preceding atom", i)
                pending = (ch, i)
                i += 1
            elif ch == ".":
                if pending is not None:
                    self.error("dangling bond symbol", pending[1])
                if branches:
                    self.error("'.' inside a branch", i)
                prev = None
                i += 1
            elif ch.isdigit() or ch == "%":
                if prev is None:
                    self.error("ring closure without a preceding atom", i)
                start = i
                if ch == "%":
                    digits = s[i + 1 : i + 3]
                    if len(digits) != 2 or not digits.isdigit():
                        self.error("malformed %nn ring closure", i)
                    num = int(digits)
                    i += 3
                else:
                    num = int(ch)
                    i += 1
                bond_sym = pending[0] if pending else None
                pending = None
                if num in rings:
                    other, other_sym, _ = rings.pop(num)
                    if other == prev:
                        self.error("ring closure onto the same atom", start)
                    if bond_sym and other_sym and bond_sym != other_sym:
                        if {bond_sym, other_sym} - {"/", "\\", "-"}:
                            self.error("conflicting ring-closure bond symbols", start)
                    self.add_bond(other, prev, bond_sym or other_sym, start)
                else:
                    rings[num] = (prev, bond_sym, start)
            else:
                if ch == "[":
                    atom, i = self.read_bracket(i)
                else:
                    atom, i = self.read_organic(i)
                idx = len(self.atoms)
                self.atoms.append(atom)
                if prev is not None:
                    self.add_bond(prev, idx, pending[0] if pending else None, atom.position)
                elif pending is not None:
                    self.error("dangling bond symbol", pending[1])
                pending = None
                prev = idx
        if pending is not None:
            self.error("dangling bond symbol", pending[1])
        if branches:
            self.error("unbalanced parentheses: unclosed '('", branches[-1][1])
        if rings:
            num, (_, _, pos) = min(rings.items(), key=lambda kv: kv[1][2])
            self.error(f"unmatched ring-closure digit {num}", pos)
        if not self.atoms:
            self.error("no atoms", 0)

    def add_bond(self, a: int, b: int, symbol: str | None, pos: int):
        key = (min(a, b), max(a, b))
        if key in self.bonds:
            self.error("duplicate bond between the same atoms", pos)
        if symbol is None:
            both_aromatic = self.atoms[a].aromatic and self.atoms[b].aromatic
            order = BondOrder.AROMATIC if both_aromatic else BondOrder.SINGLE
        else:
            order = _BOND_SYMBOLS[symbol]
            if order is BondOrder.AROMATIC and not (
                self.atoms[a].aromatic and self.atoms[b].aromatic
            ):
                order = BondOrder.SINGLE
        self.bonds[key] = order

    def read_organic(self, i: int) -> tuple[_ProtoAtom, int]:
        s = self.s
        two = s[i : i + 2]
        if two in ("Cl", "Br"):
            return _ProtoAtom(two, False, False, position=i), i + 2
        ch = s[i]
        if ch in _ORGANIC_VALENCES:
            return _ProtoAtom(ch, False, False, position=i), i + 1
        if ch in _AROMATIC_ORGANIC:
            return _ProtoAtom(_AROMATIC_ORGANIC[ch], True, False, position=i), i + 1
        if ch.isalpha() or ch == "*":
            self.error(f"unknown element symbol {ch!r}", i)
        self.error(f"unexpected character {ch!r}", i)

    def read_bracket(self, i: int) -> tuple[_ProtoAtom, int]:
        s = self.s
        start = i
        close = s.find("]", i)
        if close < 0:
            self.error("unclosed bracket atom", start)
        body = s[i + 1 : close]
        j = 0
        while j < len(body) and body[j].isdigit():
            j += 1  # isotope, ignored
        rest = body[j:]
        aromatic = False
        if len(rest) > 1 and rest[:2] in _AROMATIC_BRACKET:
            element, aromatic, j = _AROMATIC_BRACKET[rest[:2]], True, j + 2
        elif rest[:2] in ATOMIC_NUMBER and rest[1:2].islower():
            element, j = rest[:2], j + 2
        elif rest[:1] in ATOMIC_NUMBER:
            element, j = rest[:1], j + 1
        elif rest[:1] in _AROMATIC_BRACKET:
            element, aromatic, j = _AROMATIC_BRACKET[rest[:1]], True, j + 1
        else:
            self.error(f"unknown element symbol in bracket atom {body!r}", start + 1 + j)
        # chirality
        if j < len(body) and body[j] == "@":
            j += 1
            if j < len(body) and body[j] == "@":
                j += 1
            elif body[j : j + 2] in ("TH", "AL", "SP", "TB", "OH"):
                j += 2
                while j < len(body) and body[j].isdigit():
                    j += 1
        hcount = 0
        if j < len(body) and body[j] == "H":
            j += 1
            hcount = 1
            if j < len(body) and body[j].isdigit():
                hcount = int(body[j])
                j += 1
        charge = 0
        if j < len(body) and body[j] in "+-":
            sign = 1 if body[j] == "+" else -1
            j += 1
            if j < len(body) and body[j].isdigit():
                k = j
                while j < len(body) and body[j].isdigit():
                    j += 1
                charge = sign * int(body[k:j])
            else:
                charge = sign
                while j < len(body) and body[j] == body[j - 1]:
                    charge += sign
                    j += 1
        if j < len(body) and body[j] == ":":
            j += 1
            while j < len(body) and body[j].isdigit():
                j += 1
        if j != len(body):
            self.error(f"malformed bracket atom [{body}]", start + 1 + j)
        atom = _ProtoAtom(element, aromatic, True, charge, hcount, position=start)
        return atom, close + 1


def _implicit_hydrogens(proto: _ProtoAtom, orders: list[BondOrder], smiles: str) -> int:
    if proto.bracket:
        allowed = _allowed_valences(proto.element, proto.charge)
        if allowed and not proto.aromatic:
            used = sum(o.valence for o in orders) + proto.hcount
            if used > max(allowed):
                raise SmilesError(
                    f"valence violation on {proto.element} (valence {used:g})",
                    smiles,
                    proto.position,
                )
        return proto.hcount
    valences = _ORGANIC_VALENCES[proto.element]
    if proto.aromatic:
        n_arom = sum(1 for o in orders if o is BondOrder.AROMATIC)
        used = sum(o.value for o in orders if o is not BondOrder.AROMATIC) + n_arom + 1
        return max(0, valences[0] - used)
    used = sum(o.value for o in orders)
    for v in valences:
        if used <= v:
            return v - used
    raise SmilesError(
        f"valence violation on {proto.element} (valence {used})", smiles, proto.position
    )


def _bridges(n: int, adjacency: Sequence[Sequence[int]]) -> set[tuple[int, int]]:
    """Bridge edges (as sorted pairs) by iterative low-link DFS."""
    disc = [-1] * n
    low = [0] * n
    bridges = set()
    timer = 0
    for root in range(n):
        if disc[root] >= 0:
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, -1, iter(adjacency[root]))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for u in it:
                if u == parent:
                    continue
                if disc[u] < 0:
                    disc[u] = low[u] = timer
                    timer += 1
                    stack.append((u, v, iter(adjacency[u])))
                    advanced = True
                    break
                low[v] = min(low[v], disc[u])
            if advanced:
                continue
            stack.pop()
            if parent >= 0:
                low[parent] = min(low[parent], low[v])
                if low[v] > disc[parent]:
                    bridges.add((min(v, parent), max(v, parent)))
    return bridges


def _assemble(atoms: Sequence[Atom], bonds: Iterable[Bond], smiles: str = "") -> Molecule:
    """Build a Molecule, recomputing adjacency and ring flags."""
    n = len(atoms)
    bonds = sorted(
        (Bond(min(b.begin, b.end), max(b.begin, b.end), b.order) for b in bonds),
        key=lambda b: (b.begin, b.end),
    )
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for b in bonds:
        nbrs[b.begin].append(b.end)
        nbrs[b.end].append(b.begin)
    adjacency = tuple(tuple(sorted(x)) for x in nbrs)
    bridges = _bridges(n, adjacency)
    ring_bonds = []
    ring_atoms = [False] * n
    for b in bonds:
        in_ring = (b.begin, b.end) not in bridges
        order = b.order
        if order is BondOrder.AROMATIC and not in_ring:
            order = BondOrder.SINGLE
        if in_ring:
            ring_atoms[b.begin] = ring_atoms[b.end] = True
        ring_bonds.append(Bond(b.begin, b.end, order, in_ring))
    atoms = tuple(
        Atom(a.element, a.formal_charge, a.aromatic, a.implicit_h, ring_atoms[i], a.bracket)
        for i, a in enumerate(atoms)
    )
    return Molecule(atoms, tuple(ring_bonds), adjacency, smiles)


def parse_smiles(smiles: str) -> Molecule:
    """Parse ``smiles`` into a :class:`Molecule`.

    Raises :class:`SmilesError` (a ``ValueError``) with the offending
    character offset for malformed input or valence violations.
    """
    if not isinstance(smiles, str) or not smiles.strip():
        raise SmilesError("empty SMILES", str(smiles), 0)
    smiles = smiles.strip()
    p = _Parser(smiles)
    p.parse()

    orders: list[list[BondOrder]] = [[] for _ in p.atoms]
    for (a, b), order in p.bonds.items():
        orders[a].append(order)
        orders[b].append(order)
    hcounts = [_implicit_hydrogens(pa, orders[i], smiles) for i, pa in enumerate(p.atoms)]

    # Explicit [H] atoms attached to a heavy atom fold into that atom's count.
    drop = set()
    for i, pa in enumerate(p.atoms):
        if pa.element != "H" or pa.charge != 0:
            continue
        nbrs = [b if a == i else a for (a, b) in p.bonds if i in (a, b)]
        if len(nbrs) == 1 and p.atoms[nbrs[0]].element != "H":
            drop.add(i)
            hcounts[nbrs[0]] += 1 + hcounts[i]
    keep = [i for i in range(len(p.atoms)) if i not in drop]
    remap = {old: new for new, old in enumerate(keep)}
    atoms = [
        Atom(p.atoms[i].element, p.atoms[i].charge, p.atoms[i].aromatic, hcounts[i],
             False, p.atoms[i].bracket)
        for i in keep
    ]
    bonds = [
        Bond(remap[a], remap[b], order)
        for (a, b), order in p.bonds.items()
        if a in remap and b in remap
    ]
    return _assemble(atoms, bonds, smiles)


def largest_component(mol: Molecule) -> Molecule:
    """Return the largest connected component (ties: lowest atom index)."""
    comps = mol.components()
    if len(comps) <= 1:
        return mol
    best = max(comps, key=len)
    return mol.subgraph(best)


def validate_and_filter(records, min_atoms: int = 2):
    """Parse ``(smiles, target)`` pairs, separating failures.

    Returns ``(accepted, rejected)`` where ``accepted`` holds
    ``(smiles, Molecule, target)`` triples and ``rejected`` holds
    ``(smiles, reason)`` pairs. A molecule is rejected when it fails to
    parse or has fewer than ``min_atoms`` heavy atoms in total.
    """
    accepted, rejected = [], []
    for smiles, target in records:
        try:
            mol = parse_smiles(smiles)
        except SmilesError as exc:
            rejected.append((smiles, str(exc)))
            continue
        if mol.n_atoms < min_atoms:
            rejected.append((smiles, f"too small: {mol.n_atoms} heavy atom(s)"))
            continue
        accepted.append((smiles, mol, target))
    logger.info("validated %d molecules: %d accepted, %d rejected",
                len(accepted) + len(rejected), len(accepted), len(rejected))
    return accepted, rejected
