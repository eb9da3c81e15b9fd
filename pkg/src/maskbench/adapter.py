"""File-and-subprocess exchange protocol for external imputers/classifiers.

A task is a fresh directory with an ``input/`` half written by the harness
and an ``output/`` half written by the plugin process:

    task_dir/
      input/
        data.csv             post-masking values (dataset CSV convention)
        mask.csv             post-masking observation mask
        mask-artificial.csv  which hidden cells are artificial
        manifest.json        shape/scale metadata
        labels.csv           (classify only) training labels
        folds.json           (classify only) {"train": [...], "score": [...]}
      output/
        imputed.csv          (impute)   dense, same header, no empty fields
        scores.csv           (classify) header sample_id,score

The plugin is any command containing a ``{task_dir}`` placeholder. The
protocol is stateless: everything a run needs sits in the directory, so a
failed task can be re-run from its inputs bit-exactly.

Ground-truth isolation is structural: the input files physically lack the
values of artificially hidden cells.
"""

from __future__ import annotations

import csv
import json
import shlex
import subprocess
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import (
    DataValidationError,
    DatasetManifest,
    LabelVector,
    SchemaError,
    TimeSeriesTensor,
    _expected_header,
    _fmt,
    _read_grid_csv,
)
from .masking import MaskSet, _write_mask_csv

PASS_THROUGH_RTOL = 1e-6


class AdapterError(ValueError):
    """Protocol violation by an external plugin."""


@dataclass(frozen=True)
class ExchangeTask:
    task_dir: Path
    kind: str  # "impute" or "classify"
    command: str
    timeout: float = 600.0

    def __post_init__(self):
        if self.kind not in ("impute", "classify"):
            raise ValueError(f"unknown task kind {self.kind!r}")
        if "{task_dir}" not in self.command:
            raise ValueError("command must contain the {task_dir} placeholder")
        object.__setattr__(self, "task_dir", Path(self.task_dir))

    @property
    def input_dir(self) -> Path:
        return self.task_dir / "input"

    @property
    def output_dir(self) -> Path:
        return self.task_dir / "output"


@dataclass(frozen=True)
class RunReport:
    ok: bool
    exit_code: int | None
    duration_s: float
    message: str = ""
    stderr_tail: str = ""


def _write_values_csv(path: Path, tensor: TimeSeriesTensor):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_expected_header(tensor.feature_names))
        for i in range(tensor.n_samples):
            for t in range(tensor.n_steps):
                row = [str(i), _fmt(tensor.step_index[t])]
                for j in range(tensor.n_features):
                    row.append(_fmt(tensor.values[i, t, j])
                               if tensor.observed[i, t, j] else "")
                w.writerow(row)


def export_task(tensor_after_masking: TimeSeriesTensor, masks: MaskSet,
                manifest: DatasetManifest, task_dir, *, command: str,
                kind: str = "impute", timeout: float = 600.0,
                labels: LabelVector | None = None,
                folds: dict | None = None) -> ExchangeTask:
    """Write the input half of a task directory and return the task handle.

    Refuses on manifest/tensor disagreement and on artificial cells that
    are still marked observed (the tensor must be post-masking).
    """
    if (manifest.n_samples, manifest.n_steps, manifest.n_features) != (
        tensor_after_masking.n_samples,
        tensor_after_masking.n_steps,
        tensor_after_masking.n_features,
    ):
        raise SchemaError("manifest counts disagree with the exported tensor")
    if list(manifest.feature_names) != list(tensor_after_masking.feature_names):
        raise SchemaError("manifest feature names disagree with the exported tensor")
    if (masks.artificial & tensor_after_masking.observed).any():
        raise AdapterError(
            "artificial cells still observed: export requires the post-masking tensor"
        )
    task = ExchangeTask(Path(task_dir), kind, command, timeout)
    task.input_dir.mkdir(parents=True, exist_ok=True)

    _write_values_csv(task.input_dir / "data.csv", tensor_after_masking)
    _write_mask_csv(task.input_dir / "mask.csv", tensor_after_masking.observed,
                    tensor_after_masking.feature_names,
                    tensor_after_masking.step_index)
    _write_mask_csv(task.input_dir / "mask-artificial.csv", masks.artificial,
                    tensor_after_masking.feature_names,
                    tensor_after_masking.step_index)
    with open(task.input_dir / "manifest.json", "w") as fh:
        json.dump(manifest.to_json(), fh, indent=2)
        fh.write("\n")

    if kind == "classify":
        if labels is None or folds is None:
            raise AdapterError("classify tasks need labels and folds")
        train_ids = [int(i) for i in folds["train"]]
        with open(task.input_dir / "labels.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["sample_id", "label"])
            for i in train_ids:
                w.writerow([str(i), str(int(labels.labels[i]))])
        with open(task.input_dir / "folds.json", "w") as fh:
            json.dump({"train": train_ids,
                       "score": [int(i) for i in folds["score"]]}, fh)
            fh.write("\n")
    return task


def run_external(task: ExchangeTask) -> RunReport:
    """Run the plugin command; never raises for plugin failures.

    Success requires exit code 0 and the presence of the expected output
    file. Timeouts and nonzero exits come back as failure reports with the
    captured stderr tail, so a grid can keep going.
    """
    task.output_dir.mkdir(parents=True, exist_ok=True)
    # literal placeholder substitution: commands may legitimately contain
    # other braces (JSON hyperparameter blobs), so str.format is off limits
    command = task.command.replace("{task_dir}", str(task.task_dir))
    argv = shlex.split(command)
    start = time.perf_counter()
    try:
        proc = subprocess.run(
            argv, capture_output=True, text=True, timeout=task.timeout
        )
    except subprocess.TimeoutExpired as exc:
        stderr = exc.stderr or ""
        if isinstance(stderr, bytes):
            stderr = stderr.decode(errors="replace")
        return RunReport(False, None, time.perf_counter() - start,
                         f"timeout after {task.timeout}s", stderr[-2000:])
    except OSError as exc:
        return RunReport(False, None, time.perf_counter() - start,
                         f"could not launch {argv[0]!r}: {exc}")
    duration = time.perf_counter() - start
    expected = "imputed.csv" if task.kind == "impute" else "scores.csv"
    if proc.returncode != 0:
        return RunReport(False, proc.returncode, duration,
                         f"plugin exited {proc.returncode}",
                         (proc.stderr or "")[-2000:])
    if not (task.output_dir / expected).exists():
        return RunReport(False, proc.returncode, duration,
                         f"plugin exited 0 but wrote no output/{expected}",
                         (proc.stderr or "")[-2000:])
    return RunReport(True, proc.returncode, duration)


def import_result(task: ExchangeTask) -> TimeSeriesTensor:
    """Load and validate output/imputed.csv against the task's own inputs.

    Enforces shape, finiteness everywhere, and pass-through: at every cell
    the input marked observed, the output must match the input value to
    ``PASS_THROUGH_RTOL`` relative (external models often reconstruct in
    float32).
    """
    with open(task.input_dir / "manifest.json") as fh:
        manifest = DatasetManifest.from_json(json.load(fh))
    n, s, f = manifest.n_samples, manifest.n_steps, manifest.n_features

    in_cells, steps = _read_grid_csv(task.input_dir / "data.csv",
                                     manifest.feature_names, n, s)
    mask_cells, _ = _read_grid_csv(task.input_dir / "mask.csv",
                                   manifest.feature_names, n, s)
    observed_in = (np.char.strip(np.asarray(mask_cells, dtype=str)) == "1")
    in_arr = np.char.strip(np.asarray(in_cells, dtype=str))
    values_in = np.where(observed_in, in_arr, "0").astype(np.float64)

    out_path = task.output_dir / "imputed.csv"
    if not out_path.exists():
        raise FileNotFoundError(out_path)
    out_cells, _ = _read_grid_csv(out_path, manifest.feature_names, n, s)
    out_arr = np.char.strip(np.asarray(out_cells, dtype=str))
    empty = out_arr == ""
    if empty.any():
        r, j = np.argwhere(empty)[0]
        raise AdapterError(
            f"imputed.csv: empty field at row {r + 2}, "
            f"feature {manifest.feature_names[j]!r}: output must be dense"
        )
    values_out = out_arr.astype(np.float64)
    bad = ~np.isfinite(values_out)
    if bad.any():
        r, j = np.argwhere(bad)[0]
        i, t = divmod(int(r), s)
        raise DataValidationError(
            f"non-finite imputed value at (sample={i}, step={t}, feature={j})"
        )

    tol = PASS_THROUGH_RTOL * np.maximum(np.abs(values_in), 1.0)
    violated = observed_in & (np.abs(values_out - values_in) > tol)
    if violated.any():
        r, j = np.argwhere(violated)[0]
        i, t = divmod(int(r), s)
        raise AdapterError(
            f"pass-through violation at (sample={i}, step={t}, feature={j}): "
            f"input {values_in[r, j]!r} became {values_out[r, j]!r} "
            f"(tolerance {PASS_THROUGH_RTOL} relative)"
        )

    return TimeSeriesTensor(
        values=values_out.reshape(n, s, f),
        observed=np.ones((n, s, f), dtype=np.bool_),
        feature_names=tuple(manifest.feature_names),
        step_index=steps,
    )


def import_scores(task: ExchangeTask, sample_ids) -> np.ndarray:
    """Read output/scores.csv and return scores aligned to ``sample_ids``."""
    path = task.output_dir / "scores.csv"
    if not path.exists():
        raise FileNotFoundError(path)
    scores = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["sample_id", "score"]:
            raise AdapterError(f"scores.csv: header {header}")
        for row in reader:
            scores[int(row[0])] = float(row[1])
    missing = [int(i) for i in sample_ids if int(i) not in scores]
    if missing:
        raise AdapterError(f"scores.csv: missing sample ids {missing[:5]}")
    out = np.array([scores[int(i)] for i in sample_ids], dtype=np.float64)
    if not np.isfinite(out).all():
        raise AdapterError("scores.csv: non-finite score")
    return out
