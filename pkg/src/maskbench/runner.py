"""Experiment grid execution and Table-style reporting.

A grid cell is one (strategy, timing, normalization, imputer) combination;
each cell runs once per seed. The pipeline order is the whole point:

- NBM: fit stats -> transform -> mask -> impute -> score
- NAM: mask -> fit stats (excluding masked cells) -> transform -> impute -> score

Pre-masking applies one fixed mask per (cell, seed); in-mini-batch timing
draws one mask per (epoch, batch) from the deterministic stream and unions
them for evaluation, since classical imputers have no training loop to
interleave with.

Cell failures are isolated: the grid completes, failures land in their own
section of the report, and the process exit code distinguishes clean (0),
partial (2) and fatal (1) outcomes.

The CSV report contains only deterministic quantities; wall-clock timings
go to a separate timings.csv so that reports from identical configurations
are byte-identical.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .adapter import export_task, import_result, import_scores, run_external
from .data import (
    DatasetManifest,
    TimeSeriesTensor,
    load_dataset,
    split_kfold,
)
from .downstream import ClassifierScore, evaluate_downstream
from .imputers import ImputerDescriptor, classical_descriptors, fit, impute
from .masking import (
    MaskSet,
    MaskSpec,
    apply_mask,
    generate_mask,
    minibatch_mask_stream,
    save_maskset,
    union_masksets,
)
from .metrics import ImputationScore, Stopwatch, masked_errors
from .normalization import fit_stats, inverse_transform, save_norm_stats, transform
from .synth import CohortConfig, MechanismParams, build_cohort_dataset

TIMINGS = ("pre_mask", "mini_batch")
NORMALIZATIONS = ("NBM", "NAM")

# Table panel naming convention: strategy, timing, normalization
_PANEL_ORDER = (
    ("augmentation", "mini_batch", "NBM"),
    ("augmentation", "pre_mask", "NBM"),
    ("augmentation", "pre_mask", "NAM"),
    ("overlay", "mini_batch", "NBM"),
    ("overlay", "pre_mask", "NBM"),
    ("overlay", "pre_mask", "NAM"),
)


def panel_name(strategy: str, timing: str, normalization: str) -> str:
    part = "Mini-Batch Mask" if timing == "mini_batch" else "Pre-Mask"
    return f"{strategy.capitalize()} {part} {normalization}"


@dataclass(frozen=True)
class GridCell:
    cell_id: str
    panel: str
    strategy: str
    timing: str
    normalization: str
    imputer: ImputerDescriptor


@dataclass
class ExperimentConfig:
    dataset: object  # path-like or CohortConfig
    imputers: list = field(default_factory=classical_descriptors)
    strategies: tuple = ("augmentation",)
    timings: tuple = ("pre_mask",)
    normalizations: tuple = ("NBM",)
    table1_panels: bool = False
    pattern: str = "random"
    rate: float = 0.2
    block_shape: tuple | None = None
    seeds: tuple = (0,)
    k_folds: int = 5
    metric_space: str = "normalized"
    downstream: bool = False
    classifier: str = "native_linear"
    classifier_command: str | None = None
    classifier_timeout: float = 600.0
    epochs: int = 1
    batch_size: int = 256
    jobs: int = 1

    def __post_init__(self):
        if not self.imputers:
            raise ValueError("imputers axis is empty")
        if not self.seeds:
            raise ValueError("seeds axis is empty")
        if not self.table1_panels and not (
            self.strategies and self.timings and self.normalizations
        ):
            raise ValueError("empty grid axis")
        for s in self.strategies:
            if s not in ("augmentation", "overlay"):
                raise ValueError(f"unknown strategy {s!r}")
        for t in self.timings:
            if t not in TIMINGS:
                raise ValueError(f"unknown timing {t!r}")
        for nm in self.normalizations:
            if nm not in NORMALIZATIONS:
                raise ValueError(f"unknown normalization {nm!r}")
        if self.metric_space not in ("normalized", "raw"):
            raise ValueError(f"unknown metric_space {self.metric_space!r}")
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("epochs and batch_size must be >= 1")


@dataclass
class CellSeedOutcome:
    cell: GridCell
    seed: int
    score: ImputationScore
    fit_impute_seconds: float
    classifier: ClassifierScore | None = None


@dataclass
class RunResult:
    cell: GridCell
    per_seed: list
    mae_mean: float
    mae_std: float
    mse_mean: float
    mse_std: float
    wall_s_mean: float
    roc_auc_mean: float | None = None
    pr_auc_mean: float | None = None

    @property
    def n_seeds(self) -> int:
        return len(self.per_seed)


@dataclass(frozen=True)
class FailureRecord:
    cell_id: str
    seed: int
    error: str


def expand_grid(config: ExperimentConfig) -> list:
    """Cartesian product of the configured axes, in deterministic order.

    With ``table1_panels`` the (strategy, timing, normalization) combos are
    exactly the six canonical panels instead of a full product.
    """
    if config.table1_panels:
        combos = list(_PANEL_ORDER)
    else:
        if not (config.strategies and config.timings and config.normalizations):
            raise ValueError("empty grid axis")
        combos = [
            (s, t, nm)
            for s in config.strategies
            for t in config.timings
            for nm in config.normalizations
        ]
    cells = []
    for s, t, nm in combos:
        for imp in config.imputers:
            cells.append(GridCell(
                cell_id=f"{s}-{t}-{nm}-{imp.name}",
                panel=panel_name(s, t, nm),
                strategy=s,
                timing=t,
                normalization=nm,
                imputer=imp,
            ))
    return cells


def _load_config_dataset(config: ExperimentConfig):
    if isinstance(config.dataset, CohortConfig):
        return build_cohort_dataset(config.dataset)
    tensor, labels, manifest = load_dataset(config.dataset)
    return tensor, labels, manifest


def _make_maskset(config, cell, base: TimeSeriesTensor, seed: int):
    spec = MaskSpec(
        pattern=config.pattern,
        strategy=cell.strategy,
        rate=config.rate,
        block_shape=config.block_shape if config.pattern == "block" else None,
        seed=seed,
    )
    if cell.timing == "pre_mask":
        return generate_mask(spec, base.observed)
    batches = [
        np.arange(b, min(b + config.batch_size, base.n_samples))
        for b in range(0, base.n_samples, config.batch_size)
    ]
    parts = []
    for epoch in range(config.epochs):
        for b, ids in enumerate(batches):
            parts.append(minibatch_mask_stream(spec, base.observed, epoch, b, ids))
    provenance = spec.provenance()
    provenance.update({
        "timing": "mini_batch",
        "epochs": config.epochs,
        "batch_size": config.batch_size,
        "n_batches_per_epoch": len(batches),
    })
    return union_masksets(parts, provenance)


def _task_manifest(tensor, manifest, scale, norm_provenance):
    return DatasetManifest(
        n_samples=tensor.n_samples,
        n_steps=tensor.n_steps,
        n_features=tensor.n_features,
        scale=scale,
        feature_names=list(tensor.feature_names),
        seed_provenance=manifest.seed_provenance,
        source=manifest.source,
        norm_provenance=norm_provenance,
    )


def _run_cell_seed(config, cell, seed, base, labels, manifest, folds, out_dir):
    run_dir = None
    if out_dir is not None:
        run_dir = Path(out_dir) / "runs" / cell.cell_id / f"seed{seed}"
        run_dir.mkdir(parents=True, exist_ok=True)

    if cell.normalization == "NBM":
        stats = fit_stats(base, "NBM")
        normed = transform(base, stats)
        maskset = _make_maskset(config, cell, normed, seed)
    else:
        maskset = _make_maskset(config, cell, base, seed)
        stats = fit_stats(base, "NAM", maskset)
        normed = transform(base, stats)
    masked = apply_mask(normed, maskset)

    watch = Stopwatch()
    if cell.imputer.kind == "external":
        if run_dir is None:
            raise ValueError("external imputers need an --out-dir for task exchange")
        task_manifest = _task_manifest(masked, manifest, "normalized",
                                       {"provenance": stats.provenance})
        with watch:
            task = export_task(
                masked, maskset, task_manifest, run_dir / "task",
                command=cell.imputer.external_command,
                kind="impute", timeout=cell.imputer.timeout,
            )
            report = run_external(task)
            if not report.ok:
                raise RuntimeError(
                    f"external imputer failed: {report.message}\n{report.stderr_tail}"
                )
            imputed = import_result(task)
    else:
        with watch:
            fitted = fit(cell.imputer, masked)
            imputed = impute(fitted, masked)

    if config.metric_space == "raw":
        truth_eval = inverse_transform(normed, stats)
        imputed_eval = inverse_transform(imputed, stats)
    else:
        truth_eval, imputed_eval = normed, imputed
    score = masked_errors(truth_eval.values, imputed_eval.values,
                          maskset.evaluation, space=config.metric_space)

    cls_score = None
    if config.downstream:
        if config.classifier == "external":
            scorer = _make_external_classify_scorer(
                config, imputed, labels, manifest, run_dir
            )
            cls_score = evaluate_downstream(imputed, labels, folds, "external",
                                            external_scorer=scorer)
        else:
            cls_score = evaluate_downstream(imputed, labels, folds, "native_linear")

    if run_dir is not None:
        save_maskset(maskset, run_dir, base.feature_names, base.step_index)
        save_norm_stats(stats, base.feature_names, run_dir / "norm_stats.json")
        payload = {
            "cell_id": cell.cell_id,
            "panel": cell.panel,
            "strategy": cell.strategy,
            "timing": cell.timing,
            "normalization": cell.normalization,
            "imputer": cell.imputer.name,
            "imputer_kind": cell.imputer.kind,
            "seed": seed,
            "mae": score.mae,
            "mse": score.mse,
            "n_eval_cells": score.n_eval_cells,
            "space": score.space,
            "fit_impute_seconds": watch.seconds,
        }
        if cls_score is not None:
            payload["roc_auc"] = cls_score.roc_auc
            payload["pr_auc"] = cls_score.pr_auc
            payload["classifier"] = cls_score.classifier_name
            payload["fold_roc_auc"] = list(cls_score.fold_roc_auc)
            payload["fold_pr_auc"] = list(cls_score.fold_pr_auc)
        with open(run_dir / "score.json", "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")

    return CellSeedOutcome(cell, seed, score, watch.seconds, cls_score)


def _make_external_classify_scorer(config, imputed, labels, manifest, run_dir):
    if config.classifier_command is None:
        raise ValueError("classifier='external' requires classifier_command")
    if run_dir is None:
        raise ValueError("external classifiers need an --out-dir for task exchange")
    counter = {"fold": 0}

    def scorer(train_idx, val_idx):
        zero = np.zeros(imputed.values.shape, dtype=np.bool_)
        maskset = MaskSet(zero, zero, {"timing": "none"})
        task_manifest = _task_manifest(imputed, manifest, "normalized",
                                       {"provenance": "NBM"})
        task_dir = run_dir / f"classify-fold{counter['fold']}"
        counter["fold"] += 1
        task = export_task(
            imputed, maskset, task_manifest, task_dir,
            command=config.classifier_command, kind="classify",
            timeout=config.classifier_timeout,
            labels=labels, folds={"train": train_idx, "score": val_idx},
        )
        report = run_external(task)
        if not report.ok:
            raise RuntimeError(
                f"external classifier failed: {report.message}\n{report.stderr_tail}"
            )
        return import_scores(task, val_idx)

    return scorer


def execute(config: ExperimentConfig, out_dir=None):
    """Run the full grid; returns (results, failures).

    Results are aggregated per cell across seeds (mean and population std,
    matching the mean+-std reporting convention). Failures never abort the
    grid; they are returned for the report's failures section.
    """
    base, labels, manifest = _load_config_dataset(config)
    folds = None
    if config.downstream:
        # one shared split for every cell so the downstream axis is comparable
        folds = split_kfold(base, labels, config.k_folds, seed=config.seeds[0])
    cells = expand_grid(config)
    tasks = [(cell, seed) for cell in cells for seed in config.seeds]

    outcomes = {}
    failures = []

    def run_one(cell, seed):
        return _run_cell_seed(config, cell, seed, base, labels, manifest,
                              folds, out_dir)

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            futures = {
                pool.submit(run_one, cell, seed): (cell, seed)
                for cell, seed in tasks
            }
            for fut, (cell, seed) in futures.items():
                try:
                    outcomes[(cell.cell_id, seed)] = fut.result()
                except Exception as exc:
                    failures.append(FailureRecord(cell.cell_id, seed, _brief(exc)))
    else:
        for cell, seed in tasks:
            try:
                outcomes[(cell.cell_id, seed)] = run_one(cell, seed)
            except Exception as exc:
                failures.append(FailureRecord(cell.cell_id, seed, _brief(exc)))

    results = []
    for cell in cells:
        per_seed = [outcomes[(cell.cell_id, s)] for s in config.seeds
                    if (cell.cell_id, s) in outcomes]
        if not per_seed:
            continue
        maes = np.array([o.score.mae for o in per_seed])
        mses = np.array([o.score.mse for o in per_seed])
        walls = np.array([o.fit_impute_seconds for o in per_seed])
        rocs = [o.classifier.roc_auc for o in per_seed if o.classifier]
        prs = [o.classifier.pr_auc for o in per_seed if o.classifier]
        results.append(RunResult(
            cell=cell,
            per_seed=per_seed,
            mae_mean=float(maes.mean()), mae_std=float(maes.std()),
            mse_mean=float(mses.mean()), mse_std=float(mses.std()),
            wall_s_mean=float(walls.mean()),
            roc_auc_mean=float(np.mean(rocs)) if rocs else None,
            pr_auc_mean=float(np.mean(prs)) if prs else None,
        ))
    failures.sort(key=lambda fr: (fr.cell_id, fr.seed))
    return results, failures


def _brief(exc: Exception) -> str:
    tb = traceback.format_exception_only(type(exc), exc)
    return "".join(tb).strip()


def _panel_sort_key(result: RunResult):
    combo = (result.cell.strategy, result.cell.timing, result.cell.normalization)
    try:
        rank = _PANEL_ORDER.index(combo)
    except ValueError:
        rank = len(_PANEL_ORDER)
    return (rank, combo)


def emit_report(results, failures=(), fmt="csv") -> str:
    """Render the grid outcome.

    ``csv``: machine-parsable, unrounded, deterministic (no wall times).
    ``markdown``: Table-style one row per imputer, one column triple
    (MAE, MSE, Time) per panel, mean+-std at 3 decimals.
    """
    if fmt == "csv":
        return _emit_csv(results, failures)
    if fmt == "markdown":
        return _emit_markdown(results, failures)
    raise ValueError(f"unknown report format {fmt!r}")


def _emit_csv(results, failures) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow([
        "cell_id", "panel", "strategy", "timing", "normalization", "imputer",
        "n_seeds", "n_eval_cells_mean", "mae_mean", "mae_std",
        "mse_mean", "mse_std", "roc_auc_mean", "pr_auc_mean",
    ])
    for r in sorted(results, key=lambda r: (_panel_sort_key(r), r.cell.imputer.name)):
        n_eval = float(np.mean([o.score.n_eval_cells for o in r.per_seed]))
        w.writerow([
            r.cell.cell_id, r.cell.panel, r.cell.strategy, r.cell.timing,
            r.cell.normalization, r.cell.imputer.name,
            str(r.n_seeds), repr(n_eval),
            repr(r.mae_mean), repr(r.mae_std),
            repr(r.mse_mean), repr(r.mse_std),
            "" if r.roc_auc_mean is None else repr(r.roc_auc_mean),
            "" if r.pr_auc_mean is None else repr(r.pr_auc_mean),
        ])
    for fr in failures:
        w.writerow(["FAILED", fr.cell_id, str(fr.seed), fr.error,
                    "", "", "", "", "", "", "", "", "", ""])
    return buf.getvalue()


def emit_timings_csv(results) -> str:
    """Wall-clock per (cell, seed); separate because timings are not
    deterministic and must not break report byte-identity."""
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["cell_id", "seed", "fit_impute_seconds"])
    for r in sorted(results, key=lambda r: (_panel_sort_key(r), r.cell.imputer.name)):
        for o in r.per_seed:
            w.writerow([r.cell.cell_id, str(o.seed), repr(o.fit_impute_seconds)])
    return buf.getvalue()


def _emit_markdown(results, failures) -> str:
    panels = []
    for r in sorted(results, key=_panel_sort_key):
        if r.cell.panel not in panels:
            panels.append(r.cell.panel)
    imputers = []
    for r in results:
        if r.cell.imputer.name not in imputers:
            imputers.append(r.cell.imputer.name)
    by_key = {(r.cell.panel, r.cell.imputer.name): r for r in results}

    lines = ["# Imputation benchmark", ""]
    header = ["Method"]
    for p in panels:
        header += [f"{p} MAE", f"{p} MSE", f"{p} Time (s)"]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "---|" * len(header))
    for name in imputers:
        row = [f"**{name}**"]
        for p in panels:
            r = by_key.get((p, name))
            if r is None:
                row += ["/", "/", "/"]
            else:
                row += [
                    f"{r.mae_mean:.3f}±{r.mae_std:.3f}",
                    f"{r.mse_mean:.3f}±{r.mse_std:.3f}",
                    f"{r.wall_s_mean:.3f}",
                ]
        lines.append("| " + " | ".join(row) + " |")
    if any(r.roc_auc_mean is not None for r in results):
        lines += ["", "## Downstream mortality prediction", ""]
        lines.append("| Cell | ROC-AUC | PR-AUC |")
        lines.append("|---|---|---|")
        for r in sorted(results, key=lambda r: (_panel_sort_key(r), r.cell.imputer.name)):
            if r.roc_auc_mean is not None:
                lines.append(
                    f"| {r.cell.cell_id} | {r.roc_auc_mean:.3f} | {r.pr_auc_mean:.3f} |"
                )
    if failures:
        lines += ["", "## Failures", ""]
        for fr in failures:
            lines.append(f"- `{fr.cell_id}` seed {fr.seed}: {fr.error}")
    lines.append("")
    return "\n".join(lines)


def write_reports(results, failures, out_dir) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": out / "report.csv",
        "markdown": out / "report.md",
        "timings": out / "timings.csv",
    }
    paths["csv"].write_text(_emit_csv(results, failures))
    paths["markdown"].write_text(_emit_markdown(results, failures))
    paths["timings"].write_text(emit_timings_csv(results))
    return paths


def collect_results(out_dir) -> list:
    """Rebuild RunResults from runs/<cell>/<seed>/score.json files, so a
    report can be re-emitted without re-running the grid."""
    runs = Path(out_dir) / "runs"
    if not runs.is_dir():
        raise FileNotFoundError(runs)
    payloads = []
    for path in sorted(runs.glob("*/seed*/score.json")):
        with open(path) as fh:
            payloads.append(json.load(fh))
    by_cell = {}
    for p in payloads:
        by_cell.setdefault(p["cell_id"], []).append(p)
    results = []
    for cell_id, group in sorted(by_cell.items()):
        group.sort(key=lambda p: p["seed"])
        first = group[0]
        kind = first.get("imputer_kind", "mean")
        descriptor = ImputerDescriptor(
            first["imputer"], kind,
            external_command="{task_dir}" if kind == "external" else None,
        )
        cell = GridCell(
            cell_id=cell_id, panel=first["panel"], strategy=first["strategy"],
            timing=first["timing"], normalization=first["normalization"],
            imputer=descriptor,
        )
        per_seed = [
            CellSeedOutcome(
                cell, p["seed"],
                ImputationScore(p["mae"], p["mse"], p["n_eval_cells"], p["space"]),
                p["fit_impute_seconds"],
            )
            for p in group
        ]
        maes = np.array([p["mae"] for p in group])
        mses = np.array([p["mse"] for p in group])
        walls = np.array([p["fit_impute_seconds"] for p in group])
        rocs = [p["roc_auc"] for p in group if "roc_auc" in p]
        prs = [p["pr_auc"] for p in group if "pr_auc" in p]
        results.append(RunResult(
            cell=cell, per_seed=per_seed,
            mae_mean=float(maes.mean()), mae_std=float(maes.std()),
            mse_mean=float(mses.mean()), mse_std=float(mses.std()),
            wall_s_mean=float(walls.mean()),
            roc_auc_mean=float(np.mean(rocs)) if rocs else None,
            pr_auc_mean=float(np.mean(prs)) if prs else None,
        ))
    return results


# ---------------------------------------------------------------------------
# Config file parsing (documented key-value INI dialect; see README)

def _split_list(raw: str) -> list:
    return [part.strip() for part in raw.split(",") if part.strip()]


def parse_config_file(path) -> ExperimentConfig:
    """Parse the INI experiment file into an ExperimentConfig."""
    cp = configparser.ConfigParser(interpolation=None)
    read = cp.read(path)
    if not read:
        raise FileNotFoundError(path)

    if not cp.has_section("dataset"):
        raise ValueError("config needs a [dataset] section")
    ds = cp["dataset"]
    if ds.getboolean("synthetic", fallback=False):
        mech = MechanismParams(
            protocol_period_hours=ds.getint("protocol_period", 4),
            cluster_intensity=ds.getfloat("cluster_intensity", 0.8),
            cluster_window_len=ds.getint("cluster_window", 12),
            transport_block_len=ds.getint("transport_block_len", 3),
            transport_blocks=ds.getint("transport_blocks", 1),
            abnormal_threshold_z=ds.getfloat("abnormal_z", 2.0),
            followup_prob=ds.getfloat("followup_prob", 0.9),
        )
        dataset = CohortConfig(
            n_samples=ds.getint("samples"),
            n_steps=ds.getint("steps", 48),
            n_features=ds.getint("features"),
            trajectory=ds.get("trajectory", "ar1"),
            mechanisms=mech,
            seed=ds.getint("seed", 0),
            prevalence=ds.getfloat("prevalence", 0.15),
        )
        if not ds.getboolean("mechanisms", fallback=True):
            dataset = replace(dataset, mechanisms=MechanismParams(
                protocol_period_hours=1, cluster_intensity=0.0,
                transport_block_len=0, transport_blocks=0,
                abnormal_threshold_z=float("inf"), followup_prob=0.0,
            ))
    else:
        if "path" not in ds:
            raise ValueError("[dataset] needs either path or synthetic=true")
        dataset = ds["path"]

    externals = {}
    for section in cp.sections():
        if section.startswith("external."):
            name = section.split(".", 1)[1]
            ext = cp[section]
            if "command" not in ext:
                raise ValueError(f"[{section}] needs a command")
            externals[name] = ImputerDescriptor(
                name=name, kind="external",
                external_command=ext["command"],
                timeout=ext.getfloat("timeout", 600.0),
            )

    for section in ("grid", "mask", "run"):
        if not cp.has_section(section):
            cp.add_section(section)
    grid, mask, run = cp["grid"], cp["mask"], cp["run"]

    classical = {d.name: d for d in classical_descriptors()}
    imputers = []
    for name in _split_list(grid.get("imputers", "mean, median, locf")):
        if name in classical:
            imputers.append(classical[name])
        elif name in externals:
            imputers.append(externals[name])
        else:
            raise ValueError(
                f"unknown imputer {name!r}: not classical and no [external.{name}]"
            )

    block_shape = None
    raw_shape = mask.get("block_shape", "")
    if raw_shape:
        t_len, f_len = raw_shape.lower().split("x")
        block_shape = (int(t_len), int(f_len))

    return ExperimentConfig(
        dataset=dataset,
        imputers=imputers,
        strategies=tuple(_split_list(grid.get("strategies", "augmentation"))),
        timings=tuple(_split_list(grid.get("timings", "pre_mask"))),
        normalizations=tuple(_split_list(grid.get("normalizations", "NBM"))),
        table1_panels=grid.getboolean("table1_panels", fallback=False),
        pattern=mask.get("pattern", "random"),
        rate=mask.getfloat("rate", 0.2),
        block_shape=block_shape,
        seeds=tuple(int(s) for s in _split_list(run.get("seeds", "0"))),
        k_folds=run.getint("k_folds", 5),
        metric_space=run.get("metric_space", "normalized"),
        downstream=run.getboolean("downstream", fallback=False),
        classifier=run.get("classifier", "native_linear"),
        classifier_command=run.get("classifier_command", None),
        classifier_timeout=run.getfloat("classifier_timeout", 600.0),
        epochs=run.getint("epochs", 1),
        batch_size=run.getint("batch_size", 256),
        jobs=run.getint("jobs", 1),
    )
