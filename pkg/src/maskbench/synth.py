"""Seed-deterministic synthetic ICU-like cohorts with clinical missingness.

``generate_cohort`` produces a fully observed ground-truth tensor plus
mortality labels. The four mechanism functions then edit only the
observation mask, never the values, so the ground truth survives the whole
pipeline bit-exactly; ``TimeSeriesTensor.sealed()`` applies the storage
sentinel once a tensor leaves the generator (export, benchmarking).

Canonical composition order: protocol -> condition clusters -> transport
blocks -> value-dependent follow-up. All quantitative parameters are knobs
of this generator, not claims about any particular hospital.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .data import DatasetManifest, LabelVector, TimeSeriesTensor
from .seeding import derive_rng, mix64

_TAG_LABELS = 0x1AB31
_TAG_VALUES = 0x7A1E5
_TAG_CLUSTER = 0xC1D5
_TAG_TRANSPORT = 0x7BA9
_TAG_FOLLOWUP = 0xF011

TRAJECTORIES = ("stationary_gaussian", "ar1", "deterioration")


@dataclass(frozen=True)
class MechanismParams:
    """Knobs for the four missingness mechanisms."""

    protocol_period_hours: int = 4
    cluster_intensity: float = 0.8
    cluster_window_len: int = 12
    transport_block_len: int = 3
    transport_blocks: int = 1
    abnormal_threshold_z: float = 2.0
    followup_prob: float = 0.9

    def __post_init__(self):
        if self.protocol_period_hours < 1:
            raise ValueError("protocol_period_hours must be >= 1")
        for name in ("cluster_intensity", "followup_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")


@dataclass(frozen=True)
class CohortConfig:
    n_samples: int
    n_features: int
    n_steps: int = 48
    trajectory: str = "ar1"
    mechanisms: MechanismParams = field(default_factory=MechanismParams)
    seed: int = 0
    prevalence: float = 0.15
    ar_coef: float = 0.9
    drift_sigma: float = 2.0
    drift_steps: int = 12

    def __post_init__(self):
        for name in ("n_samples", "n_steps", "n_features"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.trajectory not in TRAJECTORIES:
            raise ValueError(f"unknown trajectory {self.trajectory!r}")
        if not 0.0 <= self.prevalence <= 1.0:
            raise ValueError("prevalence must be in [0, 1]")


def generate_cohort(config: CohortConfig):
    """Build a fully observed cohort: (TimeSeriesTensor, LabelVector).

    Labels are drawn first; trajectories are conditioned on them. With the
    ``deterioration`` trajectory, positive-label samples drift upward by
    ``drift_sigma`` over the final ``drift_steps`` steps, monotonically in
    the mean.
    """
    n, s, f = config.n_samples, config.n_steps, config.n_features
    labels = (derive_rng(config.seed, _TAG_LABELS).random(n)
              < config.prevalence).astype(np.int64)
    eps = derive_rng(config.seed, _TAG_VALUES).standard_normal((n, s, f))

    if config.trajectory == "stationary_gaussian":
        values = eps
    else:
        # unit stationary variance: x0 ~ N(0,1), innovations scaled by sqrt(1-rho^2)
        rho = config.ar_coef
        scaled = eps * np.sqrt(1.0 - rho * rho)
        scaled[:, 0, :] = eps[:, 0, :]
        values = _kernels.ar1_recurrence(scaled, rho)
        if config.trajectory == "deterioration":
            d = min(config.drift_steps, s)
            ramp = np.zeros(s)
            ramp[s - d:] = config.drift_sigma * np.arange(1, d + 1) / d
            values = values + labels[:, None, None] * ramp[None, :, None]

    names = tuple(f"feature_{j}" for j in range(f))
    steps = np.arange(s, dtype=np.float64)
    tensor = TimeSeriesTensor(values, np.ones((n, s, f), dtype=np.bool_), names, steps)
    return tensor, LabelVector(labels)


def apply_protocol_missingness(tensor: TimeSeriesTensor, period_hours: int,
                               seed: int) -> TimeSeriesTensor:
    """Keep observations only on the periodic schedule grid (step 0, period,
    2*period, ...); everything off the grid becomes unobserved.

    The schedule is anchored at step 0 for every feature, matching routine
    measurement that starts at admission; ``seed`` is accepted for interface
    uniformity and reserved for future phase jitter.
    """
    del seed
    if period_hours < 1:
        raise ValueError("period_hours must be >= 1")
    on_grid = np.zeros(tensor.n_steps, dtype=np.bool_)
    on_grid[::period_hours] = True
    return tensor.with_arrays(observed=tensor.observed & on_grid[None, :, None])


def _cluster_window(seed: int, sample_id: int, n_steps: int, window_len: int):
    wl = min(window_len, n_steps)
    rng = derive_rng(seed, _TAG_CLUSTER, sample_id)
    start = int(rng.integers(0, n_steps - wl + 1))
    return start, wl, rng


def apply_condition_clusters(tensor: TimeSeriesTensor, labels: LabelVector,
                             cluster_intensity: float, seed: int,
                             window_len: int = 12) -> TimeSeriesTensor:
    """Densify observations inside one deterioration window per positive
    sample: each cell in the window is (re-)observed with probability
    ``cluster_intensity``. Negative-label samples pass through unchanged.
    """
    if not 0.0 <= cluster_intensity <= 1.0:
        raise ValueError("cluster_intensity must be in [0, 1]")
    if cluster_intensity == 0.0:
        return tensor
    observed = tensor.observed.copy()
    for i in np.flatnonzero(labels.labels == 1):
        start, wl, rng = _cluster_window(seed, int(i), tensor.n_steps, window_len)
        u = rng.random((wl, tensor.n_features))
        observed[i, start:start + wl, :] |= u < cluster_intensity
    return tensor.with_arrays(observed=observed)


def apply_transport_blocks(tensor: TimeSeriesTensor, block_len: int,
                           n_blocks: int, seed: int) -> TimeSeriesTensor:
    """Knock out ``n_blocks`` non-overlapping runs of ``block_len`` steps per
    sample, across all features simultaneously (transport / procedure gaps).

    Placement is uniform over all non-overlapping arrangements, via the
    standard combination trick: draw ``n_blocks`` distinct offsets, sort,
    and stretch each by the block length.
    """
    if block_len == 0 or n_blocks == 0:
        return tensor
    s = tensor.n_steps
    if block_len < 0 or block_len > s:
        raise ValueError(f"block_len must be in [0, {s}], got {block_len}")
    if n_blocks * block_len > s:
        raise ValueError(
            f"{n_blocks} blocks of {block_len} steps exceed the feasible "
            f"non-overlapping placements in {s} steps"
        )
    observed = tensor.observed.copy()
    slots = s - n_blocks * (block_len - 1)
    for i in range(tensor.n_samples):
        rng = derive_rng(seed, _TAG_TRANSPORT, i)
        offsets = np.sort(rng.choice(slots, size=n_blocks, replace=False))
        for b, off in enumerate(offsets):
            start = int(off) + b * (block_len - 1)
            observed[i, start:start + block_len, :] = False
    return tensor.with_arrays(observed=observed)


def apply_value_dependent(tensor: TimeSeriesTensor, abnormal_threshold_z: float,
                          followup_prob: float, seed: int) -> TimeSeriesTensor:
    """Observed abnormal results (|z| above threshold) trigger a follow-up
    observation of the same feature at the next step with probability
    ``followup_prob``, re-observing cells the protocol left unmeasured.
    Follow-ups chain: a re-observed abnormal cell can trigger the next step.
    """
    if not 0.0 <= followup_prob <= 1.0:
        raise ValueError("followup_prob must be in [0, 1]")
    mean = np.zeros(tensor.n_features)
    scale = np.ones(tensor.n_features)
    for j in range(tensor.n_features):
        vals = tensor.values[:, :, j][tensor.observed[:, :, j]]
        if vals.size:
            mean[j] = vals.mean()
            scale[j] = max(float(vals.std()), 1e-8)
    z_abs = np.abs((tensor.values - mean) / scale)
    u = derive_rng(seed, _TAG_FOLLOWUP).random(tensor.values.shape)
    observed = _kernels.followup_scan(
        tensor.observed, z_abs, u, abnormal_threshold_z, followup_prob
    )
    return tensor.with_arrays(observed=observed)


def apply_mechanisms(tensor: TimeSeriesTensor, labels: LabelVector,
                     params: MechanismParams, seed: int) -> TimeSeriesTensor:
    """The canonical mechanism pipeline, in order: protocol, clusters,
    transport, value-dependent follow-up."""
    out = apply_protocol_missingness(tensor, params.protocol_period_hours,
                                     mix64(seed, 1))
    out = apply_condition_clusters(out, labels, params.cluster_intensity,
                                   mix64(seed, 2), params.cluster_window_len)
    out = apply_transport_blocks(out, params.transport_block_len,
                                 params.transport_blocks, mix64(seed, 3))
    out = apply_value_dependent(out, params.abnormal_threshold_z,
                                params.followup_prob, mix64(seed, 4))
    return out


def cohort_manifest(config: CohortConfig, tensor: TimeSeriesTensor) -> DatasetManifest:
    return DatasetManifest(
        n_samples=tensor.n_samples,
        n_steps=tensor.n_steps,
        n_features=tensor.n_features,
        scale="raw",
        feature_names=list(tensor.feature_names),
        seed_provenance=config.seed,
        source=f"synthetic:{config.trajectory}",
    )


def build_cohort_dataset(config: CohortConfig, with_mechanisms: bool = True):
    """Generate, apply mechanisms and seal: the dataset a benchmark consumes.

    Returns (tensor, labels, manifest) where the tensor carries the 0.0
    sentinel at unobserved cells, exactly as a loaded dataset would.
    """
    tensor, labels = generate_cohort(config)
    if with_mechanisms:
        tensor = apply_mechanisms(tensor, labels, config.mechanisms, config.seed)
    return tensor.sealed(), labels, cohort_manifest(config, tensor)


def replace_mechanisms(config: CohortConfig, **kwargs) -> CohortConfig:
    """CohortConfig copy with updated mechanism parameters."""
    return replace(config, mechanisms=replace(config.mechanisms, **kwargs))
