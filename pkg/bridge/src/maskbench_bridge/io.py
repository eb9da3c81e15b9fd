"""Task-directory I/O: the bridge's half of the exchange protocol.

Deliberately independent of the harness package: the contract is the file
layout, nothing else. Input values arrive as NaN at unobserved cells; the
output writer copies the input's decimal text verbatim for observed cells,
so pass-through is bit-exact by construction.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


class BridgeError(ValueError):
    """Malformed task directory or unusable request."""


def _read_grid(path: Path, n: int, s: int, f: int, feature_names):
    expected = ["sample_id", "step"] + list(feature_names)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != expected:
        raise BridgeError(f"{path.name}: header mismatch")
    body = rows[1:]
    if len(body) != n * s:
        raise BridgeError(f"{path.name}: {len(body)} rows, expected {n * s}")
    cells = [row[2:] for row in body]
    steps = [row[1] for row in body[:s]]
    return cells, steps


def load_task_inputs(task_dir):
    """Read manifest, values (NaN at gaps) and masks from task_dir/input."""
    task = Path(task_dir)
    manifest_path = task / "input" / "manifest.json"
    if not manifest_path.exists():
        raise BridgeError(f"missing {manifest_path}")
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    for key in ("n_samples", "n_steps", "n_features", "feature_names"):
        if key not in manifest:
            raise BridgeError(f"manifest.json missing key {key!r}")
    n, s, f = (int(manifest["n_samples"]), int(manifest["n_steps"]),
               int(manifest["n_features"]))
    names = list(manifest["feature_names"])
    if len(names) != f:
        raise BridgeError("manifest feature_names length disagrees with n_features")

    data_cells, steps = _read_grid(task / "input" / "data.csv", n, s, f, names)
    mask_cells, _ = _read_grid(task / "input" / "mask.csv", n, s, f, names)

    mask_arr = np.char.strip(np.asarray(mask_cells, dtype=str))
    observed = (mask_arr == "1").reshape(n, s, f)
    raw = np.asarray(data_cells, dtype=str)
    values = np.where(observed.reshape(-1, f), np.char.strip(raw), "nan")
    values = values.astype(np.float64).reshape(n, s, f)
    values[~observed] = np.nan
    return {
        "manifest": manifest,
        "values": values,        # NaN at unobserved cells
        "observed": observed,
        "raw_cells": data_cells,  # verbatim decimal text, for pass-through
        "steps": steps,
        "feature_names": names,
    }


def write_imputed(task_dir, inputs, predictions):
    """Write output/imputed.csv: observed cells verbatim, gaps from predictions."""
    task = Path(task_dir)
    out_dir = task / "output"
    out_dir.mkdir(parents=True, exist_ok=True)
    observed = inputs["observed"]
    n, s, f = observed.shape
    predictions = np.asarray(predictions, dtype=np.float64)
    if predictions.shape != (n, s, f):
        raise BridgeError(
            f"predictions shape {predictions.shape} != grid {(n, s, f)}"
        )
    if not np.isfinite(predictions[~observed]).all():
        raise BridgeError("non-finite prediction at a gap cell")
    header = ["sample_id", "step"] + inputs["feature_names"]
    with open(out_dir / "imputed.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        r = 0
        for i in range(n):
            for t in range(s):
                row = [str(i), inputs["steps"][t]]
                for j in range(f):
                    if observed[i, t, j]:
                        row.append(inputs["raw_cells"][r][j])
                    else:
                        row.append(repr(float(predictions[i, t, j])))
                w.writerow(row)
                r += 1
    return out_dir / "imputed.csv"


def load_classify_inputs(task_dir):
    """Classification tasks add labels.csv (training rows) and folds.json."""
    inputs = load_task_inputs(task_dir)
    task = Path(task_dir)
    labels_path = task / "input" / "labels.csv"
    folds_path = task / "input" / "folds.json"
    if not labels_path.exists():
        raise BridgeError(f"missing {labels_path}")
    if not folds_path.exists():
        raise BridgeError(f"missing {folds_path}")
    labels = {}
    with open(labels_path, newline="") as fh:
        reader = csv.reader(fh)
        if next(reader, None) != ["sample_id", "label"]:
            raise BridgeError("labels.csv: header mismatch")
        for row in reader:
            labels[int(row[0])] = int(row[1])
    with open(folds_path) as fh:
        folds = json.load(fh)
    missing = [i for i in folds["train"] if i not in labels]
    if missing:
        raise BridgeError(f"labels.csv missing training ids {missing[:5]}")
    inputs["labels"] = labels
    inputs["train_ids"] = [int(i) for i in folds["train"]]
    inputs["score_ids"] = [int(i) for i in folds["score"]]
    return inputs


def write_scores(task_dir, score_ids, scores):
    task = Path(task_dir)
    out_dir = task / "output"
    out_dir.mkdir(parents=True, exist_ok=True)
    scores = np.asarray(scores, dtype=np.float64)
    if not np.isfinite(scores).all():
        raise BridgeError("non-finite classifier score")
    with open(out_dir / "scores.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sample_id", "score"])
        for sid, sc in zip(score_ids, scores):
            w.writerow([str(int(sid)), repr(float(sc))])
    return out_dir / "scores.csv"


def write_bridge_config(task_dir, resolved: dict):
    """Record the resolved bridge configuration inside the task directory."""
    path = Path(task_dir) / "bridge-config.json"
    with open(path, "w") as fh:
        json.dump(resolved, fh, indent=2)
        fh.write("\n")
    return path
