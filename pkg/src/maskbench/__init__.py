"""maskbench: masked-evaluation harness for clinical time-series imputation.

The package turns the masking design space of imputation benchmarks into
configuration: masking pattern (random / temporal / spatial / block) x
strategy (augmentation / overlay) x timing (pre-mask / in-mini-batch) x
normalization ordering (before / after masking), with classical imputers,
masked-cell accuracy metrics, downstream mortality evaluation and a
file-based plug protocol for external models.
"""

from ._kernels import BACKEND
from .data import (
    DatasetManifest,
    DataValidationError,
    FeatureSummary,
    LabelVector,
    SchemaError,
    TimeSeriesTensor,
    export_dataset,
    load_dataset,
    split_kfold,
    summarize,
)
from .downstream import (
    ClassifierScore,
    DownstreamError,
    evaluate_downstream,
    featurize_pooled,
    pr_auc,
    roc_auc,
    train_linear,
)
from .imputers import FittedImputer, ImputerDescriptor, classical_descriptors, fit, impute
from .masking import (
    MaskingError,
    MaskSet,
    MaskSpec,
    apply_mask,
    generate_mask,
    minibatch_mask_stream,
    union_masksets,
)
from .metrics import ImputationScore, MetricsError, Stopwatch, masked_errors, masked_mae, masked_mse
from .normalization import NormStats, fit_stats, inverse_transform, transform
from .runner import ExperimentConfig, emit_report, execute, expand_grid, parse_config_file
from .synth import (
    CohortConfig,
    MechanismParams,
    apply_condition_clusters,
    apply_protocol_missingness,
    apply_transport_blocks,
    apply_value_dependent,
    build_cohort_dataset,
    generate_cohort,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ClassifierScore",
    "CohortConfig",
    "DatasetManifest",
    "DataValidationError",
    "DownstreamError",
    "ExperimentConfig",
    "FeatureSummary",
    "FittedImputer",
    "ImputationScore",
    "ImputerDescriptor",
    "LabelVector",
    "MaskingError",
    "MaskSet",
    "MaskSpec",
    "MechanismParams",
    "MetricsError",
    "NormStats",
    "SchemaError",
    "Stopwatch",
    "TimeSeriesTensor",
    "apply_condition_clusters",
    "apply_mask",
    "apply_protocol_missingness",
    "apply_transport_blocks",
    "apply_value_dependent",
    "build_cohort_dataset",
    "classical_descriptors",
    "emit_report",
    "evaluate_downstream",
    "execute",
    "expand_grid",
    "export_dataset",
    "featurize_pooled",
    "fit",
    "fit_stats",
    "generate_cohort",
    "generate_mask",
    "impute",
    "inverse_transform",
    "load_dataset",
    "masked_errors",
    "masked_mae",
    "masked_mse",
    "minibatch_mask_stream",
    "parse_config_file",
    "pr_auc",
    "roc_auc",
    "split_kfold",
    "summarize",
    "train_linear",
    "transform",
    "union_masksets",
]
