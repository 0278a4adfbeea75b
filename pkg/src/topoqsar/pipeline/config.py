"""INI-style run configuration.

Example::

    [run]
    folds = 5
    seed = 42
    workers = 2

    [models]
    ridge_lambdas = 0.001, 0.01, 0.1, 1, 10, 100, 1000
    lasso_n_lambdas = 100

    [gradient_boosting]
    n_trees = 300
    learning_rate = 0.05

    [random_forest]
    max_features = third
    n_jobs = 1

    [descriptors]
    fp_width = 1024
    fp_radius = 2
    irregularity = degree_mismatch

    [paths]
    logp_experimental = /data/logp_exp.csv

    [schema.logp_experimental]
    smiles_column = SMILES
    target_column = logP
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from topoqsar.indices import IRREGULARITY
from topoqsar.pipeline.approaches import ModelParams
from topoqsar.pipeline.datasets import DATASETS

__all__ = ["Config", "load_config"]


@dataclass
class Config:
    params: ModelParams = field(default_factory=ModelParams)
    folds: int = 5
    seed: int = 42
    workers: int = 1
    paths: dict[str, str] = field(default_factory=dict)
    schemas: dict[str, tuple[str, str]] = field(default_factory=dict)

    def schema(self, name: str) -> tuple[str | None, str | None]:
        if name in self.schemas:
            return self.schemas[name]
        info = DATASETS.get(name)
        return (info.smiles_column, info.target_column) if info else (None, None)


def _number(text: str):
    text = text.strip()
    if text.lower() in ("none", ""):
        return None
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def load_config(path=None) -> Config:
    """Read ``path`` (or return defaults when it is None)."""
    cfg = Config()
    if path is None:
        return cfg
    parser = configparser.ConfigParser()
    if not parser.read(Path(path)):
        raise FileNotFoundError(f"config file not found: {path}")
    if parser.has_section("run"):
        run = parser["run"]
        cfg.folds = run.getint("folds", cfg.folds)
        cfg.seed = run.getint("seed", cfg.seed)
        cfg.workers = run.getint("workers", cfg.workers)
    p = cfg.params
    if parser.has_section("models"):
        m = parser["models"]
        if "ridge_lambdas" in m:
            p.ridge_lambdas = tuple(float(x) for x in m["ridge_lambdas"].split(","))
        p.inner_folds = m.getint("inner_folds", p.inner_folds)
        p.inner_seed = m.getint("inner_seed", p.inner_seed)
        p.lasso_n_lambdas = m.getint("lasso_n_lambdas", p.lasso_n_lambdas)
        p.lasso_ratio = m.getfloat("lasso_ratio", p.lasso_ratio)
    for section, target in (("gradient_boosting", p.gradient_boosting),
                            ("random_forest", p.random_forest)):
        if parser.has_section(section):
            for key, value in parser[section].items():
                if key not in target:
                    raise ValueError(f"[{section}] unknown option {key!r}")
                target[key] = _number(value)
    if parser.has_section("descriptors"):
        d = parser["descriptors"]
        p.fp_width = d.getint("fp_width", p.fp_width)
        p.fp_radius = d.getint("fp_radius", p.fp_radius)
        p.irregularity = d.get("irregularity", p.irregularity)
        if p.irregularity not in IRREGULARITY:
            raise ValueError(f"unknown irregularity strategy {p.irregularity!r}; "
                             f"choose from {sorted(IRREGULARITY)}")
    if parser.has_section("paths"):
        cfg.paths = dict(parser["paths"])
    for section in parser.sections():
        if section.startswith("schema."):
            name = section.split(".", 1)[1]
            s = parser[section]
            default = cfg.schema(name)
            cfg.schemas[name] = (s.get("smiles_column", default[0]),
                                 s.get("target_column", default[1]))
    return cfg
