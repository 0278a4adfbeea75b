"""Topological-index QSAR: SMILES parsing, graph descriptors, regression models
and a cross-validated benchmark driver."""

from topoqsar.smiles import Molecule, SmilesError, parse_smiles

__version__ = "0.1.0"

__all__ = ["Molecule", "SmilesError", "parse_smiles", "__version__"]
