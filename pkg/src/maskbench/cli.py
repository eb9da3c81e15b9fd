"""Command line interface: generate, mask, run, report.

Exit codes: 0 all cells succeeded, 2 partial failures, 1 fatal error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .data import export_dataset, load_dataset
from .masking import MaskSpec, generate_mask, save_maskset
from .runner import (
    emit_report,
    execute,
    collect_results,
    parse_config_file,
    write_reports,
)
from .synth import CohortConfig, MechanismParams, build_cohort_dataset


def _add_generate(sub):
    p = sub.add_parser("generate", help="write a synthetic cohort dataset directory")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--steps", type=int, default=48)
    p.add_argument("--features", type=int, required=True)
    p.add_argument("--trajectory", default="ar1",
                   choices=("stationary_gaussian", "ar1", "deterioration"))
    p.add_argument("--prevalence", type=float, default=0.15)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--no-mechanisms", action="store_true",
                   help="keep the cohort fully observed")
    p.add_argument("--protocol-period", type=int, default=4)
    p.add_argument("--cluster-intensity", type=float, default=0.8)
    p.add_argument("--cluster-window", type=int, default=12)
    p.add_argument("--transport-block-len", type=int, default=3)
    p.add_argument("--transport-blocks", type=int, default=1)
    p.add_argument("--abnormal-z", type=float, default=2.0)
    p.add_argument("--followup-prob", type=float, default=0.9)


def _add_mask(sub):
    p = sub.add_parser("mask", help="materialize a mask set for a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--pattern", default="random",
                   choices=("random", "temporal", "spatial", "block"))
    p.add_argument("--strategy", default="augmentation",
                   choices=("augmentation", "overlay"))
    p.add_argument("--rate", type=float, default=0.2)
    p.add_argument("--block-shape", default=None,
                   help="TxF, e.g. 3x3 (required for pattern=block)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)


def _add_run(sub):
    p = sub.add_parser("run", help="execute an experiment grid from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="override the config's seed list with a single seed")
    p.add_argument("--jobs", type=int, default=None)


def _add_report(sub):
    p = sub.add_parser("report", help="re-emit a report from run directories")
    p.add_argument("--out-dir", required=True, help="directory given to `run`")
    p.add_argument("--format", default="markdown", choices=("csv", "markdown"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maskbench",
        description="masked-evaluation harness for time-series imputation",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    _add_generate(sub)
    _add_mask(sub)
    _add_run(sub)
    _add_report(sub)
    return parser


def _cmd_generate(args) -> int:
    mech = MechanismParams(
        protocol_period_hours=args.protocol_period,
        cluster_intensity=args.cluster_intensity,
        cluster_window_len=args.cluster_window,
        transport_block_len=args.transport_block_len,
        transport_blocks=args.transport_blocks,
        abnormal_threshold_z=args.abnormal_z,
        followup_prob=args.followup_prob,
    )
    config = CohortConfig(
        n_samples=args.samples, n_steps=args.steps, n_features=args.features,
        trajectory=args.trajectory, mechanisms=mech, seed=args.seed,
        prevalence=args.prevalence,
    )
    tensor, labels, manifest = build_cohort_dataset(
        config, with_mechanisms=not args.no_mechanisms
    )
    export_dataset(tensor, labels, manifest, args.out_dir)
    frac = tensor.observed.mean()
    print(f"wrote {args.out_dir}: {tensor.n_samples} samples x "
          f"{tensor.n_steps} steps x {tensor.n_features} features, "
          f"observed fraction {frac:.3f}")
    return 0


def _cmd_mask(args) -> int:
    tensor, _, _ = load_dataset(args.dataset)
    block_shape = None
    if args.block_shape:
        t_len, f_len = args.block_shape.lower().split("x")
        block_shape = (int(t_len), int(f_len))
    spec = MaskSpec(args.pattern, args.strategy, args.rate,
                    block_shape=block_shape, seed=args.seed)
    maskset = generate_mask(spec, tensor.observed)
    save_maskset(maskset, args.out_dir, tensor.feature_names, tensor.step_index)
    print(f"wrote {args.out_dir}: {maskset.n_artificial} artificial cells, "
          f"{maskset.n_evaluation} evaluation cells")
    return 0


def _cmd_run(args) -> int:
    config = parse_config_file(args.config)
    if args.seed is not None:
        config = replace(config, seeds=(args.seed,))
    if args.jobs is not None:
        config = replace(config, jobs=args.jobs)
    results, failures = execute(config, args.out_dir)
    paths = write_reports(results, failures, args.out_dir)
    print(f"wrote {paths['csv']} and {paths['markdown']} "
          f"({len(results)} cells, {len(failures)} failures)")
    if failures:
        for fr in failures:
            print(f"FAILED {fr.cell_id} seed {fr.seed}: {fr.error}",
                  file=sys.stderr)
        return 2
    return 0


def _cmd_report(args) -> int:
    results = collect_results(args.out_dir)
    text = emit_report(results, (), args.format)
    suffix = "csv" if args.format == "csv" else "md"
    path = Path(args.out_dir) / f"report.{suffix}"
    path.write_text(text)
    print(text)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "generate": _cmd_generate,
        "mask": _cmd_mask,
        "run": _cmd_run,
        "report": _cmd_report,
    }
    try:
        return handlers[args.verb](args)
    except Exception as exc:  # fatal: dataset/config problems
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
