"""Bridge CLI: complete impute/classify task directories.

    maskbench-bridge impute  --task-dir DIR --model gru [--hyper '{"epochs": 80}']
    maskbench-bridge classify --task-dir DIR --model hgb

Settings may also come from a ``bridge-config.json`` already present in the
task directory (command line flags win); the resolved configuration is
written back there for provenance. Exit code 1 with a message on any
protocol violation, unknown model, or training failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .classifiers import run_classification
from .io import (
    BridgeError,
    load_classify_inputs,
    load_task_inputs,
    write_bridge_config,
    write_imputed,
    write_scores,
)
from .models import run_imputation


def build_parser():
    parser = argparse.ArgumentParser(prog="maskbench-bridge")
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb, default_model in (("impute", "gru"), ("classify", "hgb")):
        p = sub.add_parser(verb)
        p.add_argument("--task-dir", required=True)
        p.add_argument("--model", default=None,
                       help=f"model name (default {default_model})")
        p.add_argument("--hyper", default=None,
                       help="JSON object of model hyperparameters")
        p.add_argument("--device", default=None)
        p.add_argument("--seed", type=int, default=None)
    return parser


def _resolve_config(args, default_model):
    task = Path(args.task_dir)
    config = {"model_name": default_model, "model_hyper": {},
              "device": "cpu", "seed": 0}
    existing = task / "bridge-config.json"
    if existing.exists():
        with open(existing) as fh:
            config.update(json.load(fh))
    if args.model is not None:
        config["model_name"] = args.model
    if args.hyper is not None:
        config["model_hyper"] = json.loads(args.hyper)
    if args.device is not None:
        config["device"] = args.device
    if args.seed is not None:
        config["seed"] = args.seed
    config["task_dir"] = str(task)
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.verb == "impute":
            config = _resolve_config(args, "gru")
            inputs = load_task_inputs(args.task_dir)  # validates before training
            write_bridge_config(args.task_dir, config)
            predictions = run_imputation(
                config["model_name"], inputs["values"], inputs["observed"],
                config["model_hyper"], config["device"], config["seed"],
            )
            write_imputed(args.task_dir, inputs, predictions)
        else:
            config = _resolve_config(args, "hgb")
            inputs = load_classify_inputs(args.task_dir)
            write_bridge_config(args.task_dir, config)
            scores = run_classification(
                config["model_name"], np.nan_to_num(inputs["values"]),
                inputs["train_ids"], inputs["score_ids"], inputs["labels"],
                config["model_hyper"], config["device"], config["seed"],
            )
            write_scores(args.task_dir, inputs["score_ids"], scores)
        return 0
    except (BridgeError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"bridge error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # training failures: exit 1, stderr preserved
        import traceback

        traceback.print_exc()
        print(f"bridge failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
