"""External deep-learning results quoted for comparison only.

None of these models is implemented here. GCN values were obtained under
5-fold CV on the same datasets; the GNN+PGM, GNN and ChemBERTa values come
from an 80/20 split and are not directly comparable.
"""

LABEL = "published, not reproduced"

# dataset -> (mean R^2, quoted +/- spread)
GCN_R2 = {
    "bace": (0.64, 0.05),
    "logp_synthetic": (0.91, 0.01),
    "logp_experimental": (0.37, 0.08),
    "esol": (0.87, 0.01),
    "sampl": (0.73, 0.05),
}

# dataset -> {model: R^2}
SPLIT_80_20_R2 = {
    "bace": {"GNN+PGM": 0.84, "GNN": 0.83, "ChemBERTa": 0.65},
    "logp_synthetic": {"GNN+PGM": 0.82, "GNN": 0.82, "ChemBERTa": 0.95},
    "logp_experimental": {"GNN+PGM": 0.66, "GNN": 0.63, "ChemBERTa": 0.39},
    "esol": {"GNN+PGM": 0.86, "GNN": 0.84, "ChemBERTa": 0.82},
    "sampl": {"GNN+PGM": 0.91, "GNN": 0.91, "ChemBERTa": 0.89},
}


def comparison_columns(dataset: str) -> dict:
    """Flat mapping of published scores for one dataset (empty if unknown)."""
    out = {}
    if dataset in GCN_R2:
        out["GCN"] = GCN_R2[dataset][0]
    out.update(SPLIT_80_20_R2.get(dataset, {}))
    return out
