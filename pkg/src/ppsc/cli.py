"""Command line interface.

Subcommands cover the whole workflow: simulate batches, reduce them to
feature CSVs, train and evaluate classifiers, and run the three packaged
experiment designs.  Exit codes: 0 success, 2 configuration or usage
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .classify import (
    apply_standardizer,
    clopper_pearson,
    fit_standardizer,
    predict_lda,
    read_lda_model,
    train_lda,
    write_lda_model,
)
from .errors import ConfigError, NumericalError
from .experiment import (
    ExperimentConfig,
    config_from_file,
    emit_scatter,
    run_pair,
    run_pooled,
    run_same_model_split,
    text_table,
)
from .geometry import nn_distances, observe
from .patternio import read_batch, write_batch
from .rng import mix_seed
from .simulate import (
    DeadLeavesParams,
    DiggleGrattonParams,
    PoissonParams,
    SsiParams,
    StraussHcParams,
    simulate_process,
)
from .summarize import (
    FEATURE_NAMES,
    combine_pooled,
    feature_vector,
    read_feature_csv,
    write_feature_csv,
)


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["master_seed"] = args.seed
    if getattr(args, "process", None) is not None:
        overrides["process_b"] = args.process
    if getattr(args, "classifier", None) is not None:
        overrides["classifier"] = args.classifier
    if getattr(args, "features", None) is not None:
        overrides["features"] = (
            None if args.features == "all" else tuple(args.features.split(","))
        )
    if args.config is not None:
        return config_from_file(args.config, **overrides)
    return ExperimentConfig(**overrides)


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    w = cfg.window
    if args.process_name == "poisson":
        if args.activity is None:
            raise ConfigError("simulate poisson requires --activity (the intensity)")
        params = PoissonParams(args.activity)
    elif args.process_name == "ssi":
        target_n = int(round(cfg.ssi_coverage * w.area / (math.pi * cfg.disc_radius**2)))
        params = SsiParams(cfg.hardcore, target_n, max_attempts=200 * max(target_n, 1))
    elif args.process_name == "dl":
        params = DeadLeavesParams(cfg.disc_radius, 2 * cfg.disc_radius)
    elif args.process_name == "strauss":
        if args.activity is None:
            raise ConfigError("simulate strauss requires --activity (use pair runs for calibration)")
        params = StraussHcParams(args.activity, cfg.interaction, cfg.range_R, cfg.hardcore, cfg.sweeps)
    elif args.process_name == "dg":
        if args.activity is None:
            raise ConfigError("simulate dg requires --activity (use pair runs for calibration)")
        params = DiggleGrattonParams(args.activity, cfg.dg_delta, cfg.dg_rho, cfg.dg_kappa, cfg.sweeps)
    else:
        raise ConfigError(f"unknown process {args.process_name!r}")
    sims = [
        simulate_process(w, params, mix_seed(cfg.master_seed, args.process_name, i))
        for i in range(args.n)
    ]
    paths = write_batch(sims, args.out)
    print(f"wrote {len(paths)} realizations to {args.out}")
    return 0


def _cmd_features(args: argparse.Namespace) -> int:
    realizations = read_batch(args.in_dir)
    rows = []
    if args.pool is None:
        for r in realizations:
            fv = feature_vector(observe(r, args.margin), args.hardcore)
            rows.append((r.label or "unknown", r.seed or 0, fv))
    else:
        if args.pool < 2:
            raise ConfigError("--pool must be >= 2")
        if len(realizations) % args.pool:
            raise ConfigError(
                f"--pool {args.pool} does not divide {len(realizations)} realizations"
            )
        for g in range(len(realizations) // args.pool):
            chunk = realizations[g * args.pool : (g + 1) * args.pool]
            observed = [observe(r, args.margin) for r in chunk]
            vectors = [feature_vector(o, args.hardcore) for o in observed]
            dists = [nn_distances(o) for o in observed]
            fv = combine_pooled(vectors, dists, args.hardcore)
            rows.append((chunk[0].label or "unknown", chunk[0].seed or 0, fv))
    write_feature_csv(args.out, rows)
    print(f"wrote {len(rows)} feature rows to {args.out}")
    return 0


def _split_by_label(rows):
    labels: list[str] = []
    for label, _, _ in rows:
        if label not in labels:
            labels.append(label)
    if len(labels) != 2:
        raise ConfigError(f"expected exactly 2 labels in feature file, found {labels}")
    X = {lab: np.array([r[2].to_array() for r in rows if r[0] == lab]) for lab in labels}
    return labels, X


def _select(X: np.ndarray, names) -> np.ndarray:
    cols = [FEATURE_NAMES.index(n) for n in names]
    return X[:, cols]


def _cmd_train(args: argparse.Namespace) -> int:
    if args.classifier != "lda":
        raise ConfigError("only lda models can be persisted; use pair runs for others")
    rows = read_feature_csv(args.features)
    labels, X = _split_by_label(rows)
    names = FEATURE_NAMES if args.feature_subset is None else tuple(args.feature_subset.split(","))
    for n in names:
        if n not in FEATURE_NAMES:
            raise ConfigError(f"unknown feature name: {n}")
    a, b = _select(X[labels[0]], names), _select(X[labels[1]], names)
    std = fit_standardizer(np.vstack([a, b]), names)
    model = train_lda(std.apply(a), std.apply(b))
    write_lda_model(args.out, model, std, names, (labels[0], labels[1]))
    print(f"trained lda on {len(a)} + {len(b)} rows; model written to {args.out}")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    model, std, names, class_labels = read_lda_model(args.model)
    if names is None or class_labels is None or std is None:
        raise ConfigError(f"{args.model}: model file lacks features/classes/standardizer")
    rows = read_feature_csv(args.features)
    labels, X = _split_by_label(rows)
    if set(labels) != set(class_labels):
        raise ConfigError(
            f"feature labels {labels} do not match model classes {list(class_labels)}"
        )
    report: dict = {"kind": "evaluate", "classes": list(class_labels), "test": {}}
    lines = []
    for truth, label in enumerate(class_labels):
        Z = apply_standardizer(std, _select(X[label], names))
        pred = predict_lda(model, Z)
        errors = int((pred != truth).sum())
        total = len(pred)
        lo, hi = clopper_pearson(errors, total)
        report["test"][label] = {
            "total": total,
            "errors": errors,
            "rate": errors / total,
            "ci": [lo, hi],
        }
        lines.append(
            f"{label:<14} {errors:>4}/{total:<4} rate {errors / total:.3f} "
            f"ci [{lo:.3f}, {hi:.3f}]"
        )
    print("\n".join(lines))
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    return 0


def _cmd_pair(args: argparse.Namespace) -> int:
    report = run_pair(_load_config(args), args.out, jobs=args.jobs)
    print(text_table(report), end="")
    return 0


def _cmd_split(args: argparse.Namespace) -> int:
    report = run_same_model_split(_load_config(args), args.out, jobs=args.jobs)
    print(text_table(report), end="")
    return 0


def _cmd_pooled(args: argparse.Namespace) -> int:
    report = run_pooled(_load_config(args), args.out, jobs=args.jobs)
    print(text_table(report), end="")
    return 0


def _cmd_scatter(args: argparse.Namespace) -> int:
    columns = tuple(args.columns.split(","))
    if len(columns) != 2:
        raise ConfigError(f"--columns needs two comma-separated names, got {args.columns!r}")
    rows = read_feature_csv(args.features)
    emit_scatter(rows, (columns[0], columns[1]), args.out)
    print(f"wrote scatter of {len(rows)} rows to {args.out}")
    return 0


def _add_common(p: argparse.ArgumentParser, experiment: bool = False) -> None:
    p.add_argument("--config", help="key-value config file")
    p.add_argument("--seed", type=int, help="master seed (overrides config)")
    if experiment:
        p.add_argument("--out", required=True, help="run directory for caches and reports")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers (default 1)")
        p.add_argument("--process", choices=("dl", "ssi", "dg"), help="partner process")
        p.add_argument("--classifier", choices=("lda", "logistic", "knn"))
        p.add_argument("--features", help="comma-separated feature subset, or 'all'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ppsc",
        description="Summarize-and-classify comparisons of regular point processes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a batch of realizations")
    _add_common(p)
    p.add_argument("--process", dest="process_name", required=True,
                   choices=("poisson", "strauss", "dl", "ssi", "dg"))
    p.add_argument("--n", type=int, required=True, help="number of realizations")
    p.add_argument("--activity", type=float, help="activity (strauss/dg) or intensity (poisson)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("features", help="summary vectors for a realization batch")
    p.add_argument("--in", dest="in_dir", required=True, help="realization directory")
    p.add_argument("--out", required=True, help="output feature CSV")
    p.add_argument("--margin", type=float, default=2.5, help="observation margin")
    p.add_argument("--hardcore", type=float, default=2.0, help="hard-core distance")
    p.add_argument("--pool", type=int, help="pool consecutive groups of this size")
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("train", help="train a classifier on a labelled feature CSV")
    p.add_argument("--features", required=True, help="feature CSV with two labels")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--classifier", default="lda", choices=("lda", "logistic", "knn"))
    p.add_argument("--feature-subset", help="comma-separated feature names")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a stored model on a feature CSV")
    p.add_argument("--model", required=True, help="model file from train")
    p.add_argument("--features", required=True, help="feature CSV with two labels")
    p.add_argument("--out", help="optional JSON report path")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("pair", help="strauss-versus-partner experiment")
    _add_common(p, experiment=True)
    p.set_defaults(func=_cmd_pair)

    p = sub.add_parser("split", help="same-process split experiment (null check)")
    _add_common(p, experiment=True)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("pooled", help="pair experiment on pooled groups")
    _add_common(p, experiment=True)
    p.set_defaults(func=_cmd_pooled)

    p = sub.add_parser("scatter", help="two feature columns as a plot-ready CSV")
    p.add_argument("--features", required=True, help="feature CSV")
    p.add_argument("--columns", default="alpha,beta", help="two feature names")
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(func=_cmd_scatter)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    # The numerical family must come first: LinAlgError subclasses
    # ValueError, and a linear-algebra failure is exit 3, not usage.
    except (NumericalError, np.linalg.LinAlgError, ArithmeticError, AssertionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, FileNotFoundError, NotADirectoryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
