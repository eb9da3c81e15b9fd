"""External imputer/classifier plugin for the maskbench task-directory
protocol: deep models in, imputed.csv / scores.csv out."""

from .io import BridgeError, load_classify_inputs, load_task_inputs, write_imputed, write_scores
from .models import available_models, run_imputation
from .classifiers import run_classification

__version__ = "0.1.0"

__all__ = [
    "BridgeError",
    "available_models",
    "load_classify_inputs",
    "load_task_inputs",
    "run_classification",
    "run_imputation",
    "write_imputed",
    "write_scores",
]
