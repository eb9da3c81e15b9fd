"""Missing-aware per-feature standardization with explicit fitting regimes.

Two regimes fix the central ordering question of the harness:

- ``NBM`` (normalize before masking): statistics come from every originally
  observed cell, so they are independent of any artificial mask.
- ``NAM`` (normalize after masking): statistics come from cells that are
  observed AND not artificially masked, so hidden cells cannot leak into
  the scale.

Scale is the population (divide-by-n) standard deviation, floored at
``SCALE_FLOOR`` so constant features never divide by zero. The floor and
the population convention are part of the cross-implementation contract.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import SENTINEL, SchemaError, TimeSeriesTensor
from .masking import MaskSet

SCALE_FLOOR = 1e-8
REGIMES = ("NBM", "NAM")


@dataclass(frozen=True)
class NormStats:
    """Per-feature location/scale with fitting provenance."""

    mean: np.ndarray
    scale: np.ndarray
    provenance: str
    counts: np.ndarray

    def __post_init__(self):
        mean = np.ascontiguousarray(self.mean, dtype=np.float64)
        scale = np.ascontiguousarray(self.scale, dtype=np.float64)
        counts = np.ascontiguousarray(self.counts, dtype=np.int64)
        if self.provenance not in REGIMES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if not (mean.shape == scale.shape == counts.shape) or mean.ndim != 1:
            raise SchemaError("mean/scale/counts must be 1-D and share a shape")
        if (scale < SCALE_FLOOR).any():
            raise ValueError(f"scale below floor {SCALE_FLOOR}")
        if (counts < 0).any():
            raise ValueError("negative fitting count")
        for arr in (mean, scale, counts):
            arr.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "counts", counts)

    @property
    def n_features(self) -> int:
        return self.mean.shape[0]


def fit_stats(tensor: TimeSeriesTensor, regime: str,
              maskset: MaskSet | None = None) -> NormStats:
    """Fit per-feature mean and population std under the given regime.

    NAM requires the maskset that defines the artificial missingness; NBM
    ignores it. Features with fewer than two fitting cells get the floor
    scale; their counts record how thin the fit was.
    """
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}")
    if regime == "NAM":
        if maskset is None:
            raise ValueError("NAM fitting requires a maskset")
        fit_mask = tensor.observed & ~maskset.artificial
    else:
        fit_mask = tensor.observed

    f = tensor.n_features
    mean = np.zeros(f)
    scale = np.full(f, SCALE_FLOOR)
    counts = np.zeros(f, dtype=np.int64)
    for j in range(f):
        vals = tensor.values[:, :, j][fit_mask[:, :, j]]
        counts[j] = vals.size
        if vals.size:
            mean[j] = vals.mean()
        if vals.size >= 2:
            scale[j] = max(float(vals.std()), SCALE_FLOOR)
    return NormStats(mean, scale, regime, counts)


def _check_features(tensor: TimeSeriesTensor, stats: NormStats):
    if stats.n_features != tensor.n_features:
        raise SchemaError(
            f"stats cover {stats.n_features} features, tensor has {tensor.n_features}"
        )


def transform(tensor: TimeSeriesTensor, stats: NormStats) -> TimeSeriesTensor:
    """Standardize observed cells: (x - mean) / scale; sentinel elsewhere."""
    _check_features(tensor, stats)
    z = (tensor.values - stats.mean) / stats.scale
    return tensor.with_arrays(values=np.where(tensor.observed, z, SENTINEL))


def inverse_transform(tensor: TimeSeriesTensor, stats: NormStats) -> TimeSeriesTensor:
    """Exact algebraic inverse of :func:`transform`."""
    _check_features(tensor, stats)
    x = tensor.values * stats.scale + stats.mean
    return tensor.with_arrays(values=np.where(tensor.observed, x, SENTINEL))


def save_norm_stats(stats: NormStats, feature_names, path) -> Path:
    """Write norm_stats.json: provenance once, then per-feature records."""
    path = Path(path)
    payload = {
        "provenance": stats.provenance,
        "scale_floor": SCALE_FLOOR,
        "features": {
            str(name): {
                "mean": float(stats.mean[j]),
                "scale": float(stats.scale[j]),
                "count": int(stats.counts[j]),
            }
            for j, name in enumerate(feature_names)
        },
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return path


def load_norm_stats(path) -> tuple:
    """Read norm_stats.json back into (NormStats, feature_names)."""
    with open(path) as fh:
        payload = json.load(fh)
    names = list(payload["features"])
    mean = np.array([payload["features"][n]["mean"] for n in names])
    scale = np.array([payload["features"][n]["scale"] for n in names])
    counts = np.array([payload["features"][n]["count"] for n in names])
    return NormStats(mean, scale, payload["provenance"], counts), names
