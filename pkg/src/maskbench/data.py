"""Tensor data model, dataset directory I/O and cross-validation splitting.

A dataset lives on disk as four files (the exchange layout every other
module and every external plugin consumes):

- ``data.csv``     header ``sample_id,step,<feature_1>,...,<feature_F>``,
  one row per (sample, step), sample-major then step-minor, both ascending.
  Values are decimal text that round-trips the underlying float64 exactly;
  a field may be empty only where the paired mask is 0.
- ``mask.csv``     identical header and row order, fields in {0, 1}.
- ``labels.csv``   header ``sample_id,label``, label in {0, 1}.
- ``manifest.json`` keys ``n_samples``, ``n_steps``, ``n_features``,
  ``scale``, ``feature_names``, ``seed_provenance``.

In memory, cells with ``observed == 0`` carry a 0.0 sentinel at every I/O
boundary (load, export, mask application). Correctness never depends on the
sentinel, only on the mask; intermediate tensors produced by the synthetic
generator may carry ground-truth values at unobserved cells until sealed.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .seeding import derive_rng

SENTINEL = 0.0


class SchemaError(ValueError):
    """Structural problem in a dataset directory (shapes, headers, row order)."""


class DataValidationError(ValueError):
    """Value-level problem, reported with (sample, step, feature) coordinates."""


@dataclass(frozen=True)
class TimeSeriesTensor:
    """Dense [n_samples, n_steps, n_features] values with an observation mask.

    Immutable after construction: the backing arrays are marked read-only,
    so the tensor is safe to share across parallel workers.
    """

    values: np.ndarray
    observed: np.ndarray
    feature_names: tuple
    step_index: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        observed = np.ascontiguousarray(self.observed, dtype=np.bool_)
        names = tuple(str(n) for n in self.feature_names)
        steps = np.ascontiguousarray(self.step_index, dtype=np.float64)
        if values.ndim != 3:
            raise SchemaError(f"values must be 3-D, got shape {values.shape}")
        if observed.shape != values.shape:
            raise SchemaError(
                f"observed shape {observed.shape} != values shape {values.shape}"
            )
        if len(names) != values.shape[2]:
            raise SchemaError(
                f"{len(names)} feature names for {values.shape[2]} features"
            )
        if steps.shape != (values.shape[1],):
            raise SchemaError(
                f"step_index length {steps.shape[0]} != n_steps {values.shape[1]}"
            )
        if steps.size > 1 and not np.all(np.diff(steps) > 0):
            raise SchemaError("step_index must be strictly increasing")
        bad = ~np.isfinite(values) & observed
        if bad.any():
            i, t, f = np.argwhere(bad)[0]
            raise DataValidationError(
                f"non-finite value at observed cell (sample={i}, step={t}, feature={f})"
            )
        values.flags.writeable = False
        observed.flags.writeable = False
        steps.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "observed", observed)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "step_index", steps)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_steps(self) -> int:
        return self.values.shape[1]

    @property
    def n_features(self) -> int:
        return self.values.shape[2]

    def with_arrays(self, values=None, observed=None) -> "TimeSeriesTensor":
        """A new tensor sharing names/steps, with replaced arrays."""
        return TimeSeriesTensor(
            values=self.values if values is None else values,
            observed=self.observed if observed is None else observed,
            feature_names=self.feature_names,
            step_index=self.step_index,
        )

    def sealed(self) -> "TimeSeriesTensor":
        """Copy with the 0.0 sentinel enforced at unobserved cells."""
        return self.with_arrays(values=np.where(self.observed, self.values, SENTINEL))


@dataclass(frozen=True)
class LabelVector:
    """Binary in-hospital mortality labels, one per sample."""

    labels: np.ndarray

    def __post_init__(self):
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if labels.ndim != 1:
            raise SchemaError("labels must be 1-D")
        if labels.size and not np.isin(labels, (0, 1)).all():
            raise DataValidationError("labels must be 0 or 1")
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.labels.size

    @property
    def positive_count(self) -> int:
        return int(self.labels.sum())


@dataclass
class DatasetManifest:
    n_samples: int
    n_steps: int
    n_features: int
    scale: str  # "raw" or "normalized"
    feature_names: list = field(default_factory=list)
    seed_provenance: int = 0
    source: str = ""
    norm_provenance: dict | None = None

    def __post_init__(self):
        if self.scale not in ("raw", "normalized"):
            raise SchemaError(f"unknown scale {self.scale!r}")
        if self.scale == "normalized" and self.norm_provenance is None:
            raise SchemaError("scale=normalized requires norm_provenance")

    def to_json(self) -> dict:
        out = {
            "n_samples": self.n_samples,
            "n_steps": self.n_steps,
            "n_features": self.n_features,
            "scale": self.scale,
            "feature_names": list(self.feature_names),
            "seed_provenance": self.seed_provenance,
            "source": self.source,
        }
        if self.norm_provenance is not None:
            out["norm_provenance"] = self.norm_provenance
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "DatasetManifest":
        required = ("n_samples", "n_steps", "n_features", "scale", "feature_names")
        missing = [k for k in required if k not in obj]
        if missing:
            raise SchemaError(f"manifest.json missing keys: {missing}")
        return cls(
            n_samples=int(obj["n_samples"]),
            n_steps=int(obj["n_steps"]),
            n_features=int(obj["n_features"]),
            scale=str(obj["scale"]),
            feature_names=list(obj["feature_names"]),
            seed_provenance=int(obj.get("seed_provenance", 0)),
            source=str(obj.get("source", "")),
            norm_provenance=obj.get("norm_provenance"),
        )


def _fmt(x: float) -> str:
    # shortest decimal text that parses back to the identical float64
    return repr(float(x))


def _expected_header(feature_names) -> list:
    return ["sample_id", "step"] + list(feature_names)


def _read_grid_csv(path: Path, feature_names, n_samples, n_steps):
    """Read a data/mask style CSV into a list of per-cell string fields.

    Enforces the header and sample-major, step-minor row order; returns
    (cells, steps) where cells is an (n_samples*n_steps, n_features) list of
    raw strings and steps the per-row step column of sample 0.
    """
    expected = _expected_header(feature_names)
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != expected:
            raise SchemaError(f"{path.name}: header {header} != expected {expected}")
        for row in reader:
            if len(row) != len(expected):
                raise SchemaError(
                    f"{path.name}: row {len(rows) + 2} has {len(row)} fields, "
                    f"expected {len(expected)}"
                )
            rows.append(row)
    if len(rows) != n_samples * n_steps:
        raise SchemaError(
            f"{path.name}: {len(rows)} data rows, expected "
            f"{n_samples} samples x {n_steps} steps = {n_samples * n_steps} "
            f"(first offending row: line {min(len(rows), n_samples * n_steps) + 2})"
        )
    steps = []
    for r, row in enumerate(rows):
        i, t = divmod(r, n_steps)
        if int(float(row[0])) != i:
            raise SchemaError(
                f"{path.name}: row {r + 2} sample_id {row[0]} breaks "
                f"sample-major order (expected {i})"
            )
        if i == 0:
            steps.append(float(row[1]))
        elif float(row[1]) != steps[t]:
            raise SchemaError(
                f"{path.name}: row {r + 2} step {row[1]} disagrees with "
                f"sample 0 grid ({steps[t]})"
            )
    return [row[2:] for row in rows], steps


def load_dataset(root_path) -> tuple:
    """Load (TimeSeriesTensor, LabelVector, DatasetManifest) from a directory.

    Raises FileNotFoundError for missing files, SchemaError for structural
    problems (naming the first offending row) and DataValidationError for
    non-finite values at observed cells.
    """
    root = Path(root_path)
    for name in ("data.csv", "mask.csv", "labels.csv", "manifest.json"):
        if not (root / name).exists():
            raise FileNotFoundError(root / name)

    with open(root / "manifest.json") as fh:
        manifest = DatasetManifest.from_json(json.load(fh))
    if len(manifest.feature_names) != manifest.n_features:
        raise SchemaError(
            f"manifest feature_names length {len(manifest.feature_names)} "
            f"!= n_features {manifest.n_features}"
        )
    n, s, f = manifest.n_samples, manifest.n_steps, manifest.n_features

    data_cells, steps = _read_grid_csv(root / "data.csv", manifest.feature_names, n, s)
    mask_cells, _ = _read_grid_csv(root / "mask.csv", manifest.feature_names, n, s)

    mask_arr = np.char.strip(np.asarray(mask_cells, dtype=str))
    bad_mask = (mask_arr != "0") & (mask_arr != "1")
    if bad_mask.any():
        r, j = np.argwhere(bad_mask)[0]
        raise SchemaError(
            f"mask.csv: row {r + 2} field {manifest.feature_names[j]!r} "
            f"is {mask_cells[r][j]!r}, expected 0 or 1"
        )
    observed_flat = mask_arr == "1"

    data_arr = np.char.strip(np.asarray(data_cells, dtype=str))
    empty_observed = observed_flat & (data_arr == "")
    if empty_observed.any():
        r, j = np.argwhere(empty_observed)[0]
        raise SchemaError(
            f"data.csv: row {r + 2} empty field "
            f"{manifest.feature_names[j]!r} where mask = 1"
        )
    try:
        values_flat = np.where(observed_flat, data_arr, "0").astype(np.float64)
    except ValueError:
        for r, row in enumerate(data_cells):
            for j, raw in enumerate(row):
                if observed_flat[r, j]:
                    try:
                        float(raw)
                    except ValueError:
                        raise SchemaError(
                            f"data.csv: row {r + 2} unparseable field "
                            f"{manifest.feature_names[j]!r}: {raw!r}"
                        ) from None
        raise
    nonfinite = observed_flat & ~np.isfinite(values_flat)
    if nonfinite.any():
        r, j = np.argwhere(nonfinite)[0]
        i, t = divmod(int(r), s)
        raise DataValidationError(
            f"non-finite value at observed cell (sample={i}, step={t}, feature={j})"
        )

    observed = observed_flat.reshape(n, s, f)
    values = np.where(observed, values_flat.reshape(n, s, f), SENTINEL)
    tensor = TimeSeriesTensor(values, observed, tuple(manifest.feature_names), steps)

    labels = np.zeros(n, dtype=np.int64)
    seen = 0
    with open(root / "labels.csv", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["sample_id", "label"]:
            raise SchemaError(f"labels.csv: header {header}")
        for row in reader:
            i = int(row[0])
            if not 0 <= i < n:
                raise SchemaError(f"labels.csv: sample_id {i} out of range")
            labels[i] = int(row[1])
            seen += 1
    if seen != n:
        raise SchemaError(f"labels.csv: {seen} rows, expected {n}")

    return tensor, LabelVector(labels), manifest


def export_dataset(tensor: TimeSeriesTensor, labels: LabelVector,
                   manifest: DatasetManifest, root_path) -> Path:
    """Write the dataset directory layout; observed values round-trip exactly."""
    if len(labels) != tensor.n_samples:
        raise SchemaError(
            f"{len(labels)} labels for {tensor.n_samples} samples"
        )
    if (manifest.n_samples, manifest.n_steps, manifest.n_features) != (
        tensor.n_samples, tensor.n_steps, tensor.n_features
    ):
        raise SchemaError("manifest counts disagree with tensor shape")
    root = Path(root_path)
    root.mkdir(parents=True, exist_ok=True)

    header = _expected_header(tensor.feature_names)
    with open(root / "data.csv", "w", newline="") as fd, \
            open(root / "mask.csv", "w", newline="") as fm:
        wd, wm = csv.writer(fd), csv.writer(fm)
        wd.writerow(header)
        wm.writerow(header)
        for i in range(tensor.n_samples):
            for t in range(tensor.n_steps):
                step = _fmt(tensor.step_index[t])
                drow, mrow = [str(i), step], [str(i), step]
                for j in range(tensor.n_features):
                    if tensor.observed[i, t, j]:
                        drow.append(_fmt(tensor.values[i, t, j]))
                        mrow.append("1")
                    else:
                        drow.append("")
                        mrow.append("0")
                wd.writerow(drow)
                wm.writerow(mrow)

    with open(root / "labels.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sample_id", "label"])
        for i in range(tensor.n_samples):
            w.writerow([str(i), str(int(labels.labels[i]))])

    with open(root / "manifest.json", "w") as fh:
        json.dump(manifest.to_json(), fh, indent=2)
        fh.write("\n")
    return root


def split_kfold(tensor: TimeSeriesTensor, labels: LabelVector, k: int, seed: int):
    """Stratified k-fold split, deterministic in ``seed``.

    Returns a list of (train_indices, val_indices) pairs whose validation
    sets partition the samples. Per-fold positive counts stay within one
    sample of the proportional share, so the per-fold positive rate is
    within 1/|fold| of the global rate.
    """
    n = tensor.n_samples
    y = labels.labels
    if len(labels) != n:
        raise ValueError(f"{len(labels)} labels for {n} samples")
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds n_samples={n}")
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == n:
        raise ValueError("stratification impossible: labels contain a single class")

    sizes = np.full(k, n // k, dtype=np.int64)
    sizes[: n % k] += 1
    # cumulative rounding keeps per-fold positives within 1 of proportional
    cum_sizes = np.cumsum(sizes)
    pos_bounds = np.floor(cum_sizes * (n_pos / n) + 0.5).astype(np.int64)
    pos_counts = np.diff(pos_bounds, prepend=0)

    rng = derive_rng(seed, 0x5F01D)
    pos_idx = np.flatnonzero(y == 1)
    neg_idx = np.flatnonzero(y == 0)
    rng.shuffle(pos_idx)
    rng.shuffle(neg_idx)

    folds = []
    p0 = n0 = 0
    for fold in range(k):
        take_pos = int(pos_counts[fold])
        take_neg = int(sizes[fold]) - take_pos
        val = np.sort(np.concatenate([
            pos_idx[p0:p0 + take_pos], neg_idx[n0:n0 + take_neg]
        ]))
        p0 += take_pos
        n0 += take_neg
        train = np.setdiff1d(np.arange(n), val, assume_unique=False)
        folds.append((train, val))
    return folds


@dataclass(frozen=True)
class FeatureSummary:
    name: str
    observed_count: int
    observed_fraction: float
    min: float | None
    max: float | None
    mean: float | None


def summarize(tensor: TimeSeriesTensor) -> list:
    """Per-feature observation counts and statistics over observed cells only.

    A feature with zero observed cells is reported with null statistics.
    """
    cells_per_feature = tensor.n_samples * tensor.n_steps
    out = []
    for j, name in enumerate(tensor.feature_names):
        mask = tensor.observed[:, :, j]
        vals = tensor.values[:, :, j][mask]
        count = int(mask.sum())
        if count == 0:
            out.append(FeatureSummary(name, 0, 0.0, None, None, None))
        else:
            out.append(FeatureSummary(
                name, count, count / cells_per_feature,
                float(vals.min()), float(vals.max()), float(vals.mean()),
            ))
    return out
