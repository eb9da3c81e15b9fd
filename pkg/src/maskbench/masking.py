"""Artificial missingness: patterns, strategies, timing, evaluation masks.

Four patterns select WHICH cells to hide:

- ``random``    individual cells, chosen globally over the eligible set
- ``temporal``  whole time steps per sample (all features of chosen steps)
- ``spatial``   whole features per sample (all steps of chosen features)
- ``block``     one contiguous (t_len x f_len) rectangle per selected sample

Two strategies define the eligible set and the scoreable set:

- ``augmentation``  only originally observed cells may be hidden; the
  evaluation mask equals the artificial mask.
- ``overlay``       any cell may be selected, overlapping original gaps;
  only artificial cells with ground truth (originally observed) are scored.

``rate`` is the target fraction of the ELIGIBLE set. Random masking rounds
half-up to a whole cell count; structured patterns round half-up to a whole
unit count with a minimum of one unit when rate > 0, so small rates never
silently no-op.

Mask bits are a pure function of (spec, observed, epoch, batch): unit
choices are drawn per sample from child seeds mixed as
``mix64(seed, tag, sample_id, epoch, batch)``, so any sample's mask can be
reproduced independently of batch composition. Pre-masking is the
(epoch=0, batch=0) point of the same stream.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import SENTINEL, SchemaError, TimeSeriesTensor
from .seeding import derive_rng

PATTERNS = ("random", "temporal", "spatial", "block")
STRATEGIES = ("augmentation", "overlay")

_TAG_RANDOM = 0x11
_TAG_UNIT = 0x22
_TAG_BLOCK_SELECT = 0x33


class MaskingError(ValueError):
    """Infeasible or empty masking request."""


@dataclass(frozen=True)
class MaskSpec:
    """Declarative description of an artificial-missingness draw."""

    pattern: str
    strategy: str
    rate: float
    block_shape: tuple | None = None
    seed: int = 0

    def __post_init__(self):
        if self.pattern not in PATTERNS:
            raise ValueError(f"unknown pattern {self.pattern!r}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError(f"rate must be in [0, 1], got {self.rate}")
        if (self.pattern == "block") != (self.block_shape is not None):
            raise ValueError("block_shape is required iff pattern='block'")
        if self.block_shape is not None:
            t_len, f_len = self.block_shape
            if t_len < 1 or f_len < 1:
                raise ValueError(f"block_shape dims must be >= 1, got {self.block_shape}")
            object.__setattr__(self, "block_shape", (int(t_len), int(f_len)))

    def provenance(self) -> dict:
        return {
            "pattern": self.pattern,
            "strategy": self.strategy,
            "rate": self.rate,
            "block_shape": list(self.block_shape) if self.block_shape else None,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class MaskSet:
    """Materialized masks: ``artificial`` (hidden cells) and ``evaluation``
    (hidden cells that carry ground truth and are therefore scoreable)."""

    artificial: np.ndarray
    evaluation: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        artificial = np.ascontiguousarray(self.artificial, dtype=np.bool_)
        evaluation = np.ascontiguousarray(self.evaluation, dtype=np.bool_)
        if artificial.shape != evaluation.shape or artificial.ndim != 3:
            raise SchemaError(
                f"mask shapes disagree: {artificial.shape} vs {evaluation.shape}"
            )
        if (evaluation & ~artificial).any():
            raise MaskingError("evaluation mask must be a subset of the artificial mask")
        artificial.flags.writeable = False
        evaluation.flags.writeable = False
        object.__setattr__(self, "artificial", artificial)
        object.__setattr__(self, "evaluation", evaluation)

    @property
    def n_artificial(self) -> int:
        return int(self.artificial.sum())

    @property
    def n_evaluation(self) -> int:
        return int(self.evaluation.sum())


def _cell_count(rate: float, n_eligible: int) -> int:
    return min(int(np.floor(rate * n_eligible + 0.5)), n_eligible)


def _unit_count(rate: float, n_units: int) -> int:
    count = int(np.floor(rate * n_units + 0.5))
    if rate > 0.0 and count == 0:
        count = 1
    return min(count, n_units)


def _check_observed(observed) -> np.ndarray:
    observed = np.ascontiguousarray(observed, dtype=np.bool_)
    if observed.ndim != 3:
        raise SchemaError(f"observed mask must be 3-D, got shape {observed.shape}")
    return observed


def _sample_ids(observed, ids) -> np.ndarray:
    if ids is None:
        return np.arange(observed.shape[0])
    return np.asarray(ids, dtype=np.int64)


def _random_cells(spec, observed, eligible, epoch, batch):
    flat = np.flatnonzero(eligible)
    count = _cell_count(spec.rate, flat.size)
    artificial = np.zeros(observed.shape, dtype=np.bool_).ravel()
    if count:
        rng = derive_rng(spec.seed, _TAG_RANDOM, epoch, batch)
        artificial[rng.choice(flat, size=count, replace=False)] = True
    return artificial.reshape(observed.shape)


def _unit_mask(spec, observed, epoch, batch, ids, axis):
    n, s, f = observed.shape
    n_units = s if axis == "step" else f
    count = _unit_count(spec.rate, n_units)
    units = np.zeros(observed.shape, dtype=np.bool_)
    for row, sid in enumerate(ids):
        rng = derive_rng(spec.seed, _TAG_UNIT, int(sid), epoch, batch)
        chosen = rng.choice(n_units, size=count, replace=False)
        if axis == "step":
            units[row, chosen, :] = True
        else:
            units[row, :, chosen] = True
    return units


def _block_mask(spec, observed, epoch, batch, ids):
    n, s, f = observed.shape
    t_len, f_len = spec.block_shape
    if t_len > s or f_len > f:
        raise MaskingError(
            f"block_shape {spec.block_shape} does not fit grid ({s} steps, {f} features)"
        )
    # one block per selected sample; select enough samples that the total
    # blocked area approximates rate * grid size
    blocks_wanted = spec.rate * n * s * f / (t_len * f_len)
    n_sel = _unit_count(blocks_wanted / n, n)
    units = np.zeros(observed.shape, dtype=np.bool_)
    if n_sel == 0:
        return units
    rng_sel = derive_rng(spec.seed, _TAG_BLOCK_SELECT, epoch, batch)
    selected = rng_sel.choice(n, size=n_sel, replace=False)
    for row in selected:
        rng = derive_rng(spec.seed, _TAG_UNIT, int(ids[row]), epoch, batch)
        t0 = int(rng.integers(0, s - t_len + 1))
        f0 = int(rng.integers(0, f - f_len + 1))
        units[row, t0:t0 + t_len, f0:f0 + f_len] = True
    return units


def _generate(spec, observed, epoch, batch, ids):
    eligible = observed if spec.strategy == "augmentation" else np.ones_like(observed)
    if spec.rate > 0.0 and not eligible.any():
        raise MaskingError("nothing to mask: the eligible set is empty")

    if spec.pattern == "random":
        artificial = _random_cells(spec, observed, eligible, epoch, batch)
    else:
        if spec.pattern == "temporal":
            units = _unit_mask(spec, observed, epoch, batch, ids, axis="step")
        elif spec.pattern == "spatial":
            units = _unit_mask(spec, observed, epoch, batch, ids, axis="feature")
        else:
            units = _block_mask(spec, observed, epoch, batch, ids)
        artificial = units & eligible

    evaluation = artificial & observed
    return artificial, evaluation


def generate_mask(spec: MaskSpec, observed) -> MaskSet:
    """Materialize a MaskSet over the full grid described by ``observed``.

    Deterministic in ``spec.seed``; under augmentation the artificial mask
    is disjoint from original missingness, under overlay the evaluation
    mask is the intersection of the artificial mask with observed cells.
    """
    observed = _check_observed(observed)
    ids = _sample_ids(observed, None)
    artificial, evaluation = _generate(spec, observed, 0, 0, ids)
    provenance = spec.provenance()
    provenance["timing"] = "pre_mask"
    return MaskSet(artificial, evaluation, provenance)


def minibatch_mask_stream(spec: MaskSpec, observed, epoch: int, batch_index: int,
                          batch_sample_indices) -> MaskSet:
    """One batch's mask from the in-mini-batch stream.

    The returned masks live on the full grid but are zero outside the
    batch's samples. Bits are deterministic in (seed, epoch, batch_index)
    and, for per-sample units, independent of batch composition.
    """
    observed = _check_observed(observed)
    ids = np.asarray(batch_sample_indices, dtype=np.int64)
    if ids.size == 0:
        raise MaskingError("empty mini-batch")
    if ids.min() < 0 or ids.max() >= observed.shape[0]:
        raise MaskingError(
            f"batch sample indices out of range [0, {observed.shape[0]})"
        )
    sub_artificial, sub_evaluation = _generate(
        spec, observed[ids], int(epoch), int(batch_index), ids
    )
    artificial = np.zeros(observed.shape, dtype=np.bool_)
    evaluation = np.zeros(observed.shape, dtype=np.bool_)
    artificial[ids] = sub_artificial
    evaluation[ids] = sub_evaluation
    provenance = spec.provenance()
    provenance.update({
        "timing": "mini_batch",
        "epoch": int(epoch),
        "batch_index": int(batch_index),
        "batch_samples": [int(i) for i in ids],
    })
    return MaskSet(artificial, evaluation, provenance)


def union_masksets(masksets, provenance=None) -> MaskSet:
    """Union of per-batch masks: the effective evaluation mask for imputers
    that do not train (the mini-batch timing reduced to one fixed mask)."""
    if not masksets:
        raise MaskingError("cannot union zero masksets")
    artificial = np.zeros_like(masksets[0].artificial)
    evaluation = np.zeros_like(masksets[0].evaluation)
    for ms in masksets:
        artificial |= ms.artificial
        evaluation |= ms.evaluation
    return MaskSet(artificial, evaluation, provenance or {"timing": "mini_batch_union"})


def apply_mask(tensor: TimeSeriesTensor, maskset: MaskSet) -> TimeSeriesTensor:
    """Hide the artificial cells: observed AND NOT artificial, sentinel fill.

    The input tensor is untouched; applying the same maskset twice is
    idempotent.
    """
    if maskset.artificial.shape != tensor.values.shape:
        raise SchemaError(
            f"maskset shape {maskset.artificial.shape} != tensor shape "
            f"{tensor.values.shape}"
        )
    observed = tensor.observed & ~maskset.artificial
    values = np.where(observed, tensor.values, SENTINEL)
    return tensor.with_arrays(values=values, observed=observed)


def _write_mask_csv(path: Path, mask, feature_names, step_index):
    n, s, f = mask.shape
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sample_id", "step"] + list(feature_names))
        for i in range(n):
            for t in range(s):
                w.writerow([str(i), repr(float(step_index[t]))]
                           + ["1" if mask[i, t, j] else "0" for j in range(f)])


def save_maskset(maskset: MaskSet, out_dir, feature_names, step_index) -> Path:
    """Serialize to mask-artificial.csv / mask-eval.csv / provenance.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_mask_csv(out / "mask-artificial.csv", maskset.artificial,
                    feature_names, step_index)
    _write_mask_csv(out / "mask-eval.csv", maskset.evaluation,
                    feature_names, step_index)
    with open(out / "provenance.json", "w") as fh:
        json.dump(maskset.provenance, fh, indent=2)
        fh.write("\n")
    return out
