"""Classical imputation baselines behind a single fit/impute interface.

Mean and median fit one central value per feature over VISIBLE training
cells (observed and not artificially masked); masked ground truth can never
leak into a fill value. LOCF is stateless: each gap takes the most recent
prior observation of the same (sample, feature), and leading gaps fall back
to 0.0, the feature mean in normalized space.

``kind="external"`` descriptors are placeholders resolved by the runner
through the adapter protocol; they cannot be imputed in-process.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .data import TimeSeriesTensor

KINDS = ("mean", "median", "locf", "external")
LEADING_GAP_FILL = 0.0


@dataclass(frozen=True)
class ImputerDescriptor:
    name: str
    kind: str
    fit_scope: str = "train_visible"
    external_command: str | None = None
    timeout: float = 600.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown imputer kind {self.kind!r}")
        if (self.kind == "external") != (self.external_command is not None):
            raise ValueError("external_command is required iff kind='external'")
        if self.fit_scope != "train_visible":
            raise ValueError(f"unknown fit_scope {self.fit_scope!r}")


def classical_descriptors() -> list:
    return [
        ImputerDescriptor("mean", "mean"),
        ImputerDescriptor("median", "median"),
        ImputerDescriptor("locf", "locf"),
    ]


@dataclass(frozen=True)
class FittedImputer:
    descriptor: ImputerDescriptor
    center: np.ndarray | None = None
    fallback_flags: np.ndarray | None = None


def fit(descriptor: ImputerDescriptor, train_tensor: TimeSeriesTensor) -> FittedImputer:
    """Fit on the post-masking training tensor (its mask IS the visible set)."""
    if descriptor.kind in ("locf", "external"):
        return FittedImputer(descriptor)

    f = train_tensor.n_features
    center = np.zeros(f)
    flags = np.zeros(f, dtype=np.bool_)
    for j in range(f):
        vals = train_tensor.values[:, :, j][train_tensor.observed[:, :, j]]
        if vals.size == 0:
            flags[j] = True  # no visible cells: fall back to the normalized-space mean
        elif descriptor.kind == "mean":
            center[j] = vals.mean()
        else:
            center[j] = float(np.median(vals))
    center.flags.writeable = False
    flags.flags.writeable = False
    return FittedImputer(descriptor, center, flags)


def impute(fitted: FittedImputer, tensor: TimeSeriesTensor) -> TimeSeriesTensor:
    """Fill every gap; observed cells pass through bit-exactly.

    The result is dense: every cell finite and flagged observed.
    """
    kind = fitted.descriptor.kind
    if kind == "external":
        raise ValueError(
            "external imputers run out of process via the adapter protocol; "
            "see maskbench.runner"
        )
    if kind == "locf":
        values = _kernels.locf_fill(tensor.values, tensor.observed, LEADING_GAP_FILL)
    else:
        values = np.where(tensor.observed, tensor.values, fitted.center)
    return tensor.with_arrays(values=values,
                              observed=np.ones_like(tensor.observed))
