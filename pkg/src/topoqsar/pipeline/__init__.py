"""Dataset ingestion, the seven-approach benchmark and its reports."""

from topoqsar.pipeline.approaches import (
    APPROACHES,
    ApproachSpec,
    FittedApproach,
    ModelParams,
    approach_columns,
    fit_approach,
    get_approach,
)
from topoqsar.pipeline.benchmark import (
    CellError,
    CellResult,
    EvalReport,
    randomization_test,
    run_approach,
    run_benchmark,
    run_cell,
)
from topoqsar.pipeline.config import Config, load_config
from topoqsar.pipeline.datasets import (
    DATASETS,
    LARGE_DATASETS,
    Dataset,
    DatasetError,
    fetch_dataset,
    load_dataset,
    locate_dataset,
)
from topoqsar.pipeline.features import BLOCK_ORDER, DescriptorTable, build_features, featurize
from topoqsar.pipeline.report import load_report, write_report

__all__ = [
    "APPROACHES",
    "ApproachSpec",
    "BLOCK_ORDER",
    "CellError",
    "CellResult",
    "Config",
    "DATASETS",
    "Dataset",
    "DatasetError",
    "DescriptorTable",
    "EvalReport",
    "FittedApproach",
    "LARGE_DATASETS",
    "ModelParams",
    "approach_columns",
    "build_features",
    "featurize",
    "fetch_dataset",
    "fit_approach",
    "get_approach",
    "load_config",
    "load_dataset",
    "load_report",
    "locate_dataset",
    "randomization_test",
    "run_approach",
    "run_benchmark",
    "run_cell",
    "write_report",
]
