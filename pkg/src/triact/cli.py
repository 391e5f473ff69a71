"""Command-line entry point.

Subcommands: ``gen`` (write synthetic scenes), ``train``, ``infer``,
``eval``, ``check`` (logical consistency gate), and ``ablate``. A JSON
config file can set any training or scene field; explicit flags win over
the file. The output root defaults to the TRIACT_OUT environment variable
when set.

Exit codes: 0 success, 2 configuration error, 3 data or checkpoint error,
4 numeric failure, 5 consistency violations found by ``check``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .autodiff import NumericsError, ShapeError
from .checkpoint import CheckpointError
from .exact import consistency_report
from .factorgraph import build_graph, format_graph
from .learn import TrainConfig, VARIANT_FLAGS, ablate, evaluate_model, train
from .metrics import evaluate
from .model import load_model
from .reasoning import Labeling, decode
from .report import (plot_ablation, plot_history, plot_metrics,
                     write_ablation_tsv, write_metrics_tsv)
from .scenes import SceneConfig, compat_table, gen_dataset, read_scenes, write_scenes

__all__ = [
    "RunConfig",
    "main",
    "cmd_gen",
    "cmd_train",
    "cmd_infer",
    "cmd_eval",
    "cmd_check",
    "cmd_ablate",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4
EXIT_INCONSISTENT = 5


class ConfigError(ValueError):
    pass


class DataError(RuntimeError):
    pass


@dataclass
class RunConfig:
    """Normalized invocation: command, paths, merged options, debug flags."""

    command: str
    out_dir: Path
    options: dict
    checkpoint: Path | None = None
    data: Path | None = None
    predictions: Path | None = None
    count: int = 100
    variants: tuple[str, ...] = tuple(VARIANT_FLAGS)
    dump_graph: bool = False
    trace_mf: bool = False


_TRAIN_KEYS = (
    "epochs", "batch_size", "learning_rate", "seed", "depth", "iterations",
    "dim", "edge_dim", "dropout", "compat_init", "trans_init",
    "compat_lr_scale", "trans_lr_scale",
    "freeze_compat", "freeze_trans", "train_count", "val_count",
    "data_seed", "eval_every", "checkpoint_every",
)
_SCENE_KEYS = (
    "num_actions", "feature_dim", "noise", "offset_scale", "offset_pool",
    "prototype_seed", "group_size_weights", "sizes",
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="triact",
        description="Joint action and interaction labeling on synthetic scenes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="JSON config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", type=Path, default=None,
                       help="output directory (default: $TRIACT_OUT or .)")

    def scene_flags(p):
        p.add_argument("--num-actions", type=int, default=None)
        p.add_argument("--feature-dim", type=int, default=None)
        p.add_argument("--noise", type=float, default=None)
        p.add_argument("--offset-scale", type=float, default=None)
        p.add_argument("--offset-pool", type=int, default=None,
                       help="draw group offsets from this many fixed directions")
        p.add_argument("--sizes", type=str, default=None,
                       help="comma-separated scene sizes, e.g. 3,4,5,6")

    def train_flags(p):
        p.add_argument("--epochs", type=int, default=None)
        p.add_argument("--batch-size", type=int, default=None)
        p.add_argument("--lr", type=float, default=None)
        p.add_argument("--layers", type=int, default=None,
                       help="message-passing depth")
        p.add_argument("--iterations", type=int, default=None,
                       help="refinement rounds")
        p.add_argument("--dim", type=int, default=None)
        p.add_argument("--edge-dim", type=int, default=None)
        p.add_argument("--dropout", type=float, default=None)
        p.add_argument("--lambda-c-init", type=float, default=None)
        p.add_argument("--lambda-t-init", type=float, default=None)
        p.add_argument("--compat-lr-scale", type=float, default=None,
                       help="rate multiplier for the pair penalty table")
        p.add_argument("--trans-lr-scale", type=float, default=None,
                       help="rate multiplier for the transitivity penalty")
        p.add_argument("--freeze-lambda-c", action="store_true", default=None)
        p.add_argument("--freeze-lambda-t", action="store_true", default=None)
        p.add_argument("--train-count", type=int, default=None)
        p.add_argument("--val-count", type=int, default=None)
        p.add_argument("--data-seed", type=int, default=None)
        p.add_argument("--eval-every", type=int, default=None)
        p.add_argument("--checkpoint-every", type=int, default=None)
        scene_flags(p)

    p = sub.add_parser("gen", help="generate synthetic scenes")
    common(p)
    scene_flags(p)
    p.add_argument("--count", type=int, default=100)

    p = sub.add_parser("train", help="train a model")
    common(p)
    train_flags(p)

    p = sub.add_parser("infer", help="predict labels for a scene file")
    common(p)
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--dump-graph", action="store_true")
    p.add_argument("--trace-mf", action="store_true")

    p = sub.add_parser("eval", help="evaluate a checkpoint against labeled scenes")
    common(p)
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--data", type=Path, required=True)

    p = sub.add_parser("check", help="run the logical consistency gate")
    common(p)
    p.add_argument("--predictions", type=Path, required=True)
    p.add_argument("--num-actions", type=int, default=None)

    p = sub.add_parser("ablate", help="train and compare model variants")
    common(p)
    train_flags(p)
    p.add_argument("--variants", type=str, default=None,
                   help="comma-separated subset of: " + ",".join(VARIANT_FLAGS))
    return parser


def _flag_value(args: argparse.Namespace, flag: str):
    return getattr(args, flag, None)


_FLAG_TO_KEY = {
    "seed": "seed",
    "epochs": "epochs",
    "batch_size": "batch_size",
    "lr": "learning_rate",
    "layers": "depth",
    "iterations": "iterations",
    "dim": "dim",
    "edge_dim": "edge_dim",
    "dropout": "dropout",
    "lambda_c_init": "compat_init",
    "lambda_t_init": "trans_init",
    "compat_lr_scale": "compat_lr_scale",
    "trans_lr_scale": "trans_lr_scale",
    "freeze_lambda_c": "freeze_compat",
    "freeze_lambda_t": "freeze_trans",
    "train_count": "train_count",
    "val_count": "val_count",
    "data_seed": "data_seed",
    "eval_every": "eval_every",
    "checkpoint_every": "checkpoint_every",
}
_SCENE_FLAG_TO_KEY = {
    "num_actions": "num_actions",
    "feature_dim": "feature_dim",
    "noise": "noise",
    "offset_scale": "offset_scale",
    "offset_pool": "offset_pool",
    "sizes": "sizes",
}


def _load_file_config(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a JSON object")
    scene = raw.get("scene", {})
    if not isinstance(scene, dict):
        raise ConfigError("config key 'scene' must be an object")
    unknown = [k for k in raw if k not in _TRAIN_KEYS and k != "scene"]
    unknown += [f"scene.{k}" for k in scene if k not in _SCENE_KEYS]
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return raw


def _merge_options(args: argparse.Namespace) -> dict:
    options = _load_file_config(_flag_value(args, "config"))
    scene = dict(options.get("scene", {}))
    for flag, key in _FLAG_TO_KEY.items():
        value = _flag_value(args, flag)
        if value is not None:
            options[key] = value
    for flag, key in _SCENE_FLAG_TO_KEY.items():
        value = _flag_value(args, flag)
        if value is not None:
            scene[key] = value
    if isinstance(scene.get("sizes"), str):
        try:
            scene["sizes"] = tuple(int(s) for s in scene["sizes"].split(",") if s)
        except ValueError as exc:
            raise ConfigError(f"bad --sizes value: {scene['sizes']!r}") from exc
    options["scene"] = scene
    options.pop("config", None)
    return options


def _scene_config(options: dict) -> SceneConfig:
    scene = dict(options.get("scene", {}))
    if "sizes" in scene:
        scene["sizes"] = tuple(scene["sizes"])
    if "group_size_weights" in scene:
        scene["group_size_weights"] = tuple(scene["group_size_weights"])
    try:
        return SceneConfig(**scene)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad scene config: {exc}") from exc


def _train_config(options: dict) -> TrainConfig:
    fields = {k: v for k, v in options.items() if k in _TRAIN_KEYS}
    try:
        return TrainConfig(scene=_scene_config(options), **fields)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad training config: {exc}") from exc


def _out_dir(args: argparse.Namespace) -> Path:
    out = _flag_value(args, "out")
    if out is None:
        out = Path(os.environ.get("TRIACT_OUT", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _run_config(args: argparse.Namespace) -> RunConfig:
    variants = tuple(VARIANT_FLAGS)
    raw_variants = _flag_value(args, "variants")
    if raw_variants:
        variants = tuple(v.strip() for v in raw_variants.split(",") if v.strip())
        bad = [v for v in variants if v not in VARIANT_FLAGS]
        if bad:
            raise ConfigError(f"unknown variants: {', '.join(bad)}")
    rc = RunConfig(
        command=args.command,
        out_dir=_out_dir(args),
        options=_merge_options(args),
        checkpoint=_flag_value(args, "checkpoint"),
        data=_flag_value(args, "data"),
        predictions=_flag_value(args, "predictions"),
        count=100 if _flag_value(args, "count") is None else _flag_value(args, "count"),
        variants=variants,
        dump_graph=bool(_flag_value(args, "dump_graph")),
        trace_mf=bool(_flag_value(args, "trace_mf")),
    )
    for path in (rc.checkpoint, rc.data, rc.predictions):
        if path is not None and not path.exists():
            raise DataError(f"input path does not exist: {path}")
    num_actions = _flag_value(args, "num_actions")
    if args.command == "check" and num_actions is not None:
        rc.options["scene"] = {"num_actions": num_actions}
    return rc


def _config_hash(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def _load_model(path: Path):
    try:
        return load_model(path)
    except CheckpointError:
        raise
    except OSError as exc:
        raise DataError(f"cannot read checkpoint: {exc}") from exc


def _load_scenes(path: Path) -> list:
    try:
        samples = read_scenes(path)
    except (OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
        raise DataError(f"cannot read scenes from {path}: {exc}") from exc
    if not samples:
        raise DataError(f"no scenes found in {path}")
    return samples


def cmd_gen(rc: RunConfig) -> int:
    config = _scene_config(rc.options)
    seed = int(rc.options.get("seed", 0))
    if rc.count < 1:
        raise ConfigError("--count must be positive")
    samples = gen_dataset(rc.count, config, start_seed=seed)
    scene_path = rc.out_dir / "scenes.jsonl"
    write_scenes(scene_path, samples)
    config_dict = vars(config).copy()
    config_dict["group_size_weights"] = list(config.group_size_weights)
    config_dict["sizes"] = list(config.sizes)
    manifest = {
        "count": rc.count,
        "seed": seed,
        "config": config_dict,
        "config_hash": _config_hash(config_dict),
    }
    with open(rc.out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(f"wrote {rc.count} scenes to {scene_path}")
    return EXIT_OK


def cmd_train(rc: RunConfig) -> int:
    config = _train_config(rc.options)
    model, history = train(config, rc.out_dir)
    if history:
        plot_history(rc.out_dir / "history.png", history)
    _, val_set = config.datasets()
    if val_set:
        report = evaluate_model(model, val_set)
        write_metrics_tsv(rc.out_dir / "metrics.tsv", report)
        plot_metrics(rc.out_dir / "metrics.png", report, title="validation")
        print(f"final validation: f1={report.f1:.4f} accuracy={report.accuracy:.4f} "
              f"mean_iou={report.mean_iou:.4f} "
              f"consistency_rate={report.consistency_rate:.4f}")
    print(f"checkpoints and history written to {rc.out_dir}")
    return EXIT_OK


def _check_feature_dim(model, samples) -> None:
    want = model.net.config.feature_dim
    for s in samples:
        if s.features.shape[1] != want:
            raise DataError(
                f"scene feature dimension {s.features.shape[1]} does not match "
                f"checkpoint feature dimension {want}")


def cmd_infer(rc: RunConfig) -> int:
    model = _load_model(rc.checkpoint)
    samples = _load_scenes(rc.data)
    _check_feature_dim(model, samples)
    predictions = []
    for idx, sample in enumerate(samples):
        graph = build_graph(sample.n)
        trace: list | None = [] if (rc.trace_mf and idx == 0) else None
        _, refined, _ = model.refine(sample.features, graph, trace=trace)
        predictions.append(decode(refined))
        if trace is not None:
            with open(rc.out_dir / "mf_trace.txt", "w") as fh:
                fh.write(_format_trace(trace))
    pred_path = rc.out_dir / "predictions.jsonl"
    with open(pred_path, "w") as fh:
        for lab in predictions:
            fh.write(json.dumps({"actions": lab.actions.tolist(),
                                 "relations": lab.relations.tolist()}) + "\n")
    if rc.dump_graph:
        for n in sorted({s.n for s in samples}):
            with open(rc.out_dir / f"graph_n{n}.txt", "w") as fh:
                fh.write(format_graph(build_graph(n)) + "\n")
    print(f"wrote {len(predictions)} predictions to {pred_path}")
    return EXIT_OK


def _format_trace(trace: list[dict]) -> str:
    lines = []
    for entry in trace:
        lines.append(f"round {entry['round']}")
        for name in ("actions", "relations"):
            for i, row in enumerate(entry[name]):
                cells = " ".join(f"{x:.6f}" for x in row)
                lines.append(f"  {name}[{i}]: {cells}")
    return "\n".join(lines) + "\n"


def cmd_eval(rc: RunConfig) -> int:
    model = _load_model(rc.checkpoint)
    samples = _load_scenes(rc.data)
    _check_feature_dim(model, samples)
    top = int(max(s.actions.max(initial=0) for s in samples))
    if top >= model.num_actions:
        raise DataError(
            f"data uses action class {top} but the checkpoint supports "
            f"{model.num_actions} classes")
    predictions = [model.predict(s.features) for s in samples]
    truths = [Labeling(actions=s.actions, relations=s.relations) for s in samples]
    report = evaluate(predictions, truths, model.num_actions,
                      compat_table(model.num_actions))
    write_metrics_tsv(rc.out_dir / "metrics.tsv", report)
    plot_metrics(rc.out_dir / "metrics.png", report)
    print(f"f1={report.f1:.4f} accuracy={report.accuracy:.4f} "
          f"mean_iou={report.mean_iou:.4f} "
          f"consistency_rate={report.consistency_rate:.4f}")
    return EXIT_OK


def cmd_check(rc: RunConfig) -> int:
    num_actions = int(rc.options.get("scene", {}).get("num_actions", 9))
    table = compat_table(num_actions)
    labelings = []
    try:
        with open(rc.predictions) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                d = json.loads(line)
                labelings.append(Labeling(
                    actions=np.asarray(d["actions"], dtype=np.intp),
                    relations=np.asarray(d["relations"], dtype=np.intp)))
    except (OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
        raise DataError(f"cannot read predictions: {exc}") from exc
    if not labelings:
        raise DataError("no predictions to check")
    if any(lab.actions.max(initial=0) >= num_actions for lab in labelings):
        raise DataError("prediction uses an action class outside the table")

    bad = 0
    lines = []
    for idx, lab in enumerate(labelings):
        rep = consistency_report(lab, table, build_graph(lab.n))
        lines.append(f"scene {idx}")
        lines.append(rep.format())
        if not rep.ok:
            bad += 1
    text = "\n".join(lines) + f"\nviolating scenes: {bad}/{len(labelings)}\n"
    with open(rc.out_dir / "consistency.txt", "w") as fh:
        fh.write(text)
    print(f"violating scenes: {bad}/{len(labelings)}")
    return EXIT_INCONSISTENT if bad else EXIT_OK


def cmd_ablate(rc: RunConfig) -> int:
    config = _train_config(rc.options)
    reports = ablate(config, rc.variants, rc.out_dir)
    write_ablation_tsv(rc.out_dir / "ablation.tsv", reports)
    plot_ablation(rc.out_dir / "ablation.png", reports)
    for name, rep in reports.items():
        print(f"{name}: f1={rep.f1:.4f} accuracy={rep.accuracy:.4f} "
              f"mean_iou={rep.mean_iou:.4f} "
              f"consistency_rate={rep.consistency_rate:.4f}")
    return EXIT_OK


_COMMANDS = {
    "gen": cmd_gen,
    "train": cmd_train,
    "infer": cmd_infer,
    "eval": cmd_eval,
    "check": cmd_check,
    "ablate": cmd_ablate,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        rc = _run_config(args)
        return _COMMANDS[rc.command](rc)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, CheckpointError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ShapeError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericsError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
