"""End-to-end bridge acceptance: the harness is driven only through its CLI
and file contracts (`maskbench` must be installed alongside this package).

- the identity stub completes a full grid cell and passes import validation
- a learned model (BRITS via pypots when installed, the bridge's own GRU
  otherwise) strictly beats the mean imputer's masked MAE on the same cell
"""

import csv
import json
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from maskbench_bridge.cli import main as bridge_main
from maskbench_bridge.models import HAVE_PYPOTS

MASKBENCH = shutil.which("maskbench")
pytestmark = pytest.mark.skipif(
    MASKBENCH is None, reason="maskbench CLI not on PATH"
)

DEEP_MODEL = "brits" if HAVE_PYPOTS else "gru"
DEEP_HYPER = ('{"epochs": 100}' if HAVE_PYPOTS
              else '{"epochs": 60, "hidden_size": 48}')

CONFIG = """
[dataset]
path = {cohort}

[grid]
strategies = augmentation
timings = pre_mask
normalizations = NBM
imputers = {imputers}

[mask]
pattern = random
rate = 0.2

[run]
seeds = 0

{external}
"""


def run_cli(args, cwd):
    return subprocess.run([MASKBENCH] + args, cwd=cwd,
                          capture_output=True, text=True)


def generate_cohort(workdir, samples=500):
    proc = run_cli(["generate", "--samples", str(samples), "--features", "5",
                    "--trajectory", "ar1", "--seed", "31",
                    "--out-dir", "cohort"], workdir)
    assert proc.returncode == 0, proc.stderr
    return workdir / "cohort"


def read_report(out_dir):
    with open(out_dir / "report.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {row["imputer"]: row for row in rows if row["cell_id"] != "FAILED"}


@pytest.fixture(scope="module")
def grid_run(tmp_path_factory):
    """One harness run with the identity stub, the deep model and the mean
    imputer on the same cell (same mask seed, same dataset)."""
    workdir = tmp_path_factory.mktemp("bridge-e2e")
    cohort = generate_cohort(workdir)
    external = (
        "[external.stub]\n"
        f"command = {sys.executable} -m maskbench_bridge.cli impute "
        "--task-dir {task_dir} --model identity\n"
        "timeout = 120\n\n"
        "[external.deep]\n"
        f"command = {sys.executable} -m maskbench_bridge.cli impute "
        "--task-dir {task_dir} " + f"--model {DEEP_MODEL} --hyper {DEEP_HYPER!r}\n"
        "timeout = 600\n"
    )
    (workdir / "exp.ini").write_text(CONFIG.format(
        cohort="cohort", imputers="mean, stub, deep", external=external
    ))
    proc = run_cli(["run", "--config", "exp.ini", "--out-dir", "out"], workdir)
    assert proc.returncode == 0, proc.stderr
    return workdir


def test_identity_stub_completes_grid_cell(grid_run):
    report = read_report(grid_run / "out")
    assert "stub" in report
    # identity fills gaps with 0 = the normalized-space mean fill; scores are
    # finite and the cell passed import validation (nonzero exit otherwise)
    stub_mae = float(report["stub"]["mae_mean"])
    mean_mae = float(report["mean"]["mae_mean"])
    assert np.isfinite(stub_mae)
    assert abs(stub_mae - mean_mae) < 0.05
    imputed = (grid_run / "out" / "runs" / "augmentation-pre_mask-NBM-stub"
               / "seed0" / "task" / "output" / "imputed.csv")
    assert imputed.exists()


def test_deep_model_beats_mean_imputer(grid_run):
    report = read_report(grid_run / "out")
    deep_mae = float(report["deep"]["mae_mean"])
    mean_mae = float(report["mean"]["mae_mean"])
    assert deep_mae < mean_mae, (
        f"{DEEP_MODEL} MAE {deep_mae:.3f} should beat mean fill {mean_mae:.3f}"
    )


def test_input_files_lack_masked_ground_truth(grid_run):
    """File-content audit: every artificially hidden cell is an empty field
    in the task's data.csv, so the plugin physically cannot read it."""
    task_input = (grid_run / "out" / "runs" / "augmentation-pre_mask-NBM-deep"
                  / "seed0" / "task" / "input")
    with open(task_input / "data.csv", newline="") as fh:
        data_rows = [r[2:] for r in list(csv.reader(fh))[1:]]
    with open(task_input / "mask-artificial.csv", newline="") as fh:
        art_rows = [r[2:] for r in list(csv.reader(fh))[1:]]
    audited = 0
    for data_row, art_row in zip(data_rows, art_rows):
        for cell, flag in zip(data_row, art_row):
            if flag == "1":
                assert cell == ""
                audited += 1
    assert audited > 0


def roc_auc_pairwise(scores, labels):
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    wins = sum(1.0 if p > q else 0.5 if p == q else 0.0
               for p in pos for q in neg)
    return wins / (len(pos) * len(neg))


def build_classify_task(root: Path, n=60, s=8, f=3, informative=True, seed=0):
    inp = root / "input"
    inp.mkdir(parents=True)
    rng = np.random.default_rng(seed)
    labels = (rng.random(n) < 0.5).astype(int)
    values = rng.standard_normal((n, s, f))
    if informative:
        values[:, :, 0] += labels[:, None] * 2.0
    names = [f"f{j}" for j in range(f)]
    header = ["sample_id", "step"] + names
    with open(inp / "data.csv", "w", newline="") as fd, \
            open(inp / "mask.csv", "w", newline="") as fm:
        wd, wm = csv.writer(fd), csv.writer(fm)
        wd.writerow(header)
        wm.writerow(header)
        for i in range(n):
            for t in range(s):
                wd.writerow([str(i), f"{t}.0"]
                            + [repr(float(values[i, t, j])) for j in range(f)])
                wm.writerow([str(i), f"{t}.0"] + ["1"] * f)
    (inp / "manifest.json").write_text(json.dumps({
        "n_samples": n, "n_steps": s, "n_features": f,
        "scale": "normalized", "feature_names": names, "seed_provenance": 0,
    }))
    train = list(range(0, n, 2))
    score = list(range(1, n, 2))
    with open(inp / "labels.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sample_id", "label"])
        for i in train:
            w.writerow([str(i), str(labels[i])])
    (inp / "folds.json").write_text(json.dumps({"train": train, "score": score}))
    return labels, np.array(score)


@pytest.mark.parametrize("model", ["hgb", "gru"])
def test_classifier_separates_informative_data(tmp_path, model):
    labels, score_ids = build_classify_task(tmp_path / model, informative=True)
    rc = bridge_main(["classify", "--task-dir", str(tmp_path / model),
                      "--model", model, "--hyper", '{"epochs": 120}'])
    assert rc == 0
    with open(tmp_path / model / "output" / "scores.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    scores = np.array([float(r["score"]) for r in rows])
    assert ((scores >= 0) & (scores <= 1)).all()
    auc = roc_auc_pairwise(scores, labels[score_ids])
    assert auc >= 0.9


def test_classifier_null_on_shuffled_labels(tmp_path):
    labels, score_ids = build_classify_task(tmp_path, n=200, informative=False)
    rc = bridge_main(["classify", "--task-dir", str(tmp_path), "--model", "hgb"])
    assert rc == 0
    with open(tmp_path / "output" / "scores.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    scores = np.array([float(r["score"]) for r in rows])
    auc = roc_auc_pairwise(scores, labels[score_ids])
    assert 0.3 <= auc <= 0.7
