"""End-to-end experiments: simulate, summarize, classify, report.

Three experiment shapes share one cache layout keyed by (config, master
seed):

* pair: a Strauss hard-core process against one other process, trained
  on labelled summary vectors and scored on held-out realizations.
* split: one process against itself, the batch split in half; the test
  misclassification rate should be indistinguishable from guessing.
* pooled: groups of realizations pooled into single vectors before
  training, trading sample count for per-vector stability.

Reports serialize to canonical JSON (sorted keys, fixed float repr) so a
rerun with a different worker count produces byte-identical files.  Wall
clock goes to a separate run.log, never into the report.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from joblib import Parallel, delayed
from numpy.typing import NDArray
from threadpoolctl import threadpool_limits

from .classify import (
    ConfusionCounts,
    clopper_pearson,
    fit_standardizer,
    misclassification,
    predict_knn,
    predict_lda,
    predict_logistic,
    train_lda,
    train_logistic,
)
from .errors import ConfigError
from .geometry import Realization, Window, erode_window, nn_distances, observe
from .moments import coverage_fraction
from .patternio import read_realization, write_realization
from .rng import mix_seed
from .simulate import (
    CalibrationResult,
    DeadLeavesParams,
    DiggleGrattonParams,
    ProcessParams,
    SsiParams,
    StraussHcParams,
    calibrate_activity,
    simulate_process,
)
from .summarize import (
    FEATURE_NAMES,
    FeatureVector,
    combine_pooled,
    feature_vector,
    read_feature_csv,
    write_feature_csv,
)

PROCESSES = ("strauss", "dl", "ssi", "dg")
CLASSIFIERS = ("lda", "logistic", "knn")

# Calibration is a property of the configuration, not of a particular run,
# so it uses a fixed internal seed and is cached across master seeds.
_CALIBRATION_SEED = 0x5EED_CA1B


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines an experiment except the master seed.

    n_train / n_test count realizations per class in pair experiments;
    split experiments use split_train / split_test per half, pooled
    experiments use pooled_train / pooled_test groups of group_size
    realizations.  With the defaults all three shapes consume the same
    400 realizations per process, so caches are shared.
    """

    process_b: str = "dg"
    classifier: str = "lda"
    features: tuple[str, ...] | None = None
    master_seed: int = 1
    n_train: int = 300
    n_test: int = 100
    split_train: int = 150
    split_test: int = 50
    pooled_train: int = 60
    pooled_test: int = 20
    group_size: int = 5
    window_size: float = 44.0
    margin: float = 2.5
    hardcore: float = 2.0
    interaction: float = 0.5
    range_R: float = 3.0
    dg_delta: float = 2.0
    dg_rho: float = 1.0
    dg_kappa: float = 3.0
    sweeps: int = 500
    disc_radius: float = 1.0
    ssi_coverage: float = 0.39
    dg_coverage: float = 0.51
    calibration_tol: float = 0.01
    calibration_pilots: int = 20
    calibration_step: float = 0.2
    knn_k: int = 5

    def __post_init__(self) -> None:
        if self.process_b not in ("dl", "ssi", "dg"):
            raise ConfigError(f"process_b must be one of dl, ssi, dg; got {self.process_b!r}")
        if self.classifier not in CLASSIFIERS:
            raise ConfigError(f"classifier must be one of {CLASSIFIERS}; got {self.classifier!r}")
        if self.features is not None:
            unknown = [f for f in self.features if f not in FEATURE_NAMES]
            if unknown:
                raise ConfigError(f"unknown feature names: {', '.join(unknown)}")
            if len(self.features) == 0:
                raise ConfigError("feature subset must not be empty")
            if len(set(self.features)) != len(self.features):
                raise ConfigError("feature subset contains duplicates")
            normalized = tuple(self.features)
            if normalized == FEATURE_NAMES:
                normalized = None
            object.__setattr__(self, "features", normalized)
        for name in (
            "n_train",
            "n_test",
            "split_train",
            "split_test",
            "pooled_train",
            "pooled_test",
            "group_size",
            "sweeps",
            "calibration_pilots",
            "knn_k",
        ):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.window_size <= 0 or self.margin < 0:
            raise ConfigError("window_size must be > 0 and margin >= 0")
        if 2 * self.margin >= self.window_size:
            raise ConfigError("margin too large for window")
        if not (0 < self.ssi_coverage < 1 and 0 < self.dg_coverage < 1):
            raise ConfigError("coverage targets must be in (0, 1)")

    @property
    def window(self) -> Window:
        return Window(0.0, 0.0, self.window_size, self.window_size)

    @property
    def observed_window(self) -> Window:
        return erode_window(self.window, self.margin)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return self.features if self.features is not None else FEATURE_NAMES

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["features"] = list(self.features) if self.features is not None else None
        return d


_BOOLEAN = {"true": True, "false": False}


def config_from_file(path: str | os.PathLike, **overrides) -> ExperimentConfig:
    """Key-value config file: one `name value` pair per line, # comments.

    features takes a comma-separated list or the word all.  Keyword
    overrides (e.g. a master seed from the command line) win over the
    file's values.
    """
    path = Path(path)
    types = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}
    values: dict = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition(" ")
        value = value.strip()
        if key not in types:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        if not value:
            raise ConfigError(f"{path}:{lineno}: missing value for {key!r}")
        if key == "features":
            values[key] = None if value == "all" else tuple(v.strip() for v in value.split(","))
        elif key in ("process_b", "classifier"):
            values[key] = value
        elif types[key] == "int" or isinstance(getattr(ExperimentConfig, key, None), int):
            values[key] = int(value)
        else:
            values[key] = float(value)
    values.update(overrides)
    return ExperimentConfig(**values)


# --------------------------------------------------------------------------
# Cache plumbing


def _key(*parts) -> str:
    return hashlib.sha1("|".join(repr(p) for p in parts).encode()).hexdigest()[:12]


def _worker_limits(fn: Callable, *args):
    with threadpool_limits(limits=1):
        return fn(*args)


def _pmap(fn: Callable, items: Sequence[tuple], jobs: int) -> list:
    if jobs <= 1:
        return [_worker_limits(fn, *it) for it in items]
    return Parallel(n_jobs=jobs, backend="loky")(
        delayed(_worker_limits)(fn, *it) for it in items
    )


def _measured_coverage(cfg: ExperimentConfig, params: ProcessParams, label: str,
                       out_dir: Path) -> float:
    """Mean pilot coverage of a process, cached; used as a partner target."""
    cache = out_dir / "calibration" / f"coverage-{label}-{_key(cfg.window, params, cfg.margin, cfg.disc_radius, cfg.calibration_step, cfg.calibration_pilots, _CALIBRATION_SEED)}.json"
    if cache.exists():
        return json.loads(cache.read_text())["coverage"]
    eroded = cfg.observed_window
    covs = [
        coverage_fraction(
            simulate_process(cfg.window, params, mix_seed(_CALIBRATION_SEED, "pilot", i)).points,
            eroded,
            cfg.disc_radius,
            cfg.calibration_step,
        )
        for i in range(cfg.calibration_pilots)
    ]
    result = float(np.mean(covs))
    cache.parent.mkdir(parents=True, exist_ok=True)
    cache.write_text(json.dumps({"coverage": result}, sort_keys=True) + "\n")
    return result


def _calibrated(cfg: ExperimentConfig, make_params: Callable[[float], ProcessParams],
                target: float, label: str, out_dir: Path) -> CalibrationResult:
    cache = out_dir / "calibration" / f"{label}-{_key(cfg.window, make_params(1.0), target, cfg.margin, cfg.disc_radius, cfg.calibration_step, cfg.calibration_tol, cfg.calibration_pilots, _CALIBRATION_SEED)}.json"
    if cache.exists():
        d = json.loads(cache.read_text())
        return CalibrationResult(d["activity"], d["coverage"], d["evaluations"])
    result = calibrate_activity(
        make_params,
        cfg.window,
        target,
        cfg.calibration_tol,
        _CALIBRATION_SEED,
        n_pilot=cfg.calibration_pilots,
        margin=cfg.margin,
        disc_radius=cfg.disc_radius,
        grid_step=cfg.calibration_step,
    )
    cache.parent.mkdir(parents=True, exist_ok=True)
    cache.write_text(
        json.dumps(dataclasses.asdict(result), sort_keys=True) + "\n"
    )
    return result


def resolve_params(
    cfg: ExperimentConfig, process: str, out_dir: str | os.PathLike
) -> tuple[ProcessParams, dict]:
    """Concrete simulator parameters for a process, calibrating on demand.

    Returns the parameters and a small dict describing how they were
    obtained (activities, coverages, targets) for the report.
    """
    out_dir = Path(out_dir)
    w = cfg.window
    if process == "dl":
        params = DeadLeavesParams(cfg.disc_radius, 2 * cfg.disc_radius)
        return params, {"dl": {"disc_radius": cfg.disc_radius}}
    if process == "ssi":
        # The naive count (coverage * area / disc area) lands short on the
        # observed window: sequential packing is denser near the hard window
        # edge, which depletes the eroded interior.  One proportional
        # correction from a pilot measurement closes the gap.
        def ssi_params(n: int) -> SsiParams:
            return SsiParams(cfg.hardcore, n, max_attempts=200 * max(n, 1))

        naive_n = int(round(cfg.ssi_coverage * w.area / (math.pi * cfg.disc_radius**2)))
        pilot_cov = _measured_coverage(cfg, ssi_params(naive_n), "ssi", out_dir)
        target_n = int(round(naive_n * cfg.ssi_coverage / max(pilot_cov, 1e-9)))
        measured = _measured_coverage(cfg, ssi_params(target_n), "ssi", out_dir)
        return ssi_params(target_n), {
            "ssi": {
                "target_n": target_n,
                "coverage": measured,
                "coverage_target": cfg.ssi_coverage,
            }
        }
    if process == "dg":
        def make_dg(a: float) -> DiggleGrattonParams:
            return DiggleGrattonParams(
                a, cfg.dg_delta, cfg.dg_rho, cfg.dg_kappa, cfg.sweeps,
                init_coverage=cfg.dg_coverage,
            )

        cal = _calibrated(cfg, make_dg, cfg.dg_coverage, "dg", out_dir)
        return make_dg(cal.activity), {
            "dg": {
                "activity": cal.activity,
                "coverage": cal.coverage,
                "coverage_target": cfg.dg_coverage,
            }
        }
    if process == "strauss":
        # Match the partner process's achieved intensity, so the classifier
        # has to discriminate on structure rather than density: the
        # calibrated DG hits its nominal target, while SSI and dead leaves
        # are pinned to what their pilots actually deliver.
        if cfg.process_b == "dg":
            target = cfg.dg_coverage
        elif cfg.process_b == "ssi":
            _, ssi_info = resolve_params(cfg, "ssi", out_dir)
            target = ssi_info["ssi"]["coverage"]
        else:
            dl_params, _ = resolve_params(cfg, "dl", out_dir)
            target = _measured_coverage(cfg, dl_params, "dl", out_dir)

        def make_strauss(a: float) -> StraussHcParams:
            return StraussHcParams(
                a, cfg.interaction, cfg.range_R, cfg.hardcore, cfg.sweeps,
                init_coverage=target,
            )

        cal = _calibrated(cfg, make_strauss, target, "strauss", out_dir)
        return make_strauss(cal.activity), {
            "strauss": {
                "activity": cal.activity,
                "coverage": cal.coverage,
                "coverage_target": target,
            }
        }
    raise ConfigError(f"unknown process {process!r}")


def _sim_one(window: Window, params: ProcessParams, seed: int, path: str) -> None:
    r = simulate_process(window, params, seed)
    write_realization(r, path)


def ensure_realizations(
    cfg: ExperimentConfig,
    process: str,
    count: int,
    out_dir: str | os.PathLike,
    jobs: int = 1,
) -> tuple[list[Realization], dict]:
    """count realizations of a process on the full window, cached on disk.

    Realization i is seeded mix_seed(master_seed, process, i), so batches
    are extendable: asking for more realizations reuses existing files.
    """
    out_dir = Path(out_dir)
    params, cal_info = resolve_params(cfg, process, out_dir)
    sim_dir = out_dir / "sims" / (
        f"{process}-{_key(cfg.window, params)}-s{cfg.master_seed & (2**64 - 1):016x}"
    )
    sim_dir.mkdir(parents=True, exist_ok=True)
    paths = [sim_dir / f"r{i:05d}.txt" for i in range(count)]
    missing = [
        (cfg.window, params, mix_seed(cfg.master_seed, process, i), str(paths[i]))
        for i in range(count)
        if not paths[i].exists()
    ]
    if missing:
        _pmap(_sim_one, missing, jobs)
    return [read_realization(p) for p in paths], cal_info


def _features_one(r: Realization, margin: float, hardcore: float) -> FeatureVector:
    return feature_vector(observe(r, margin), hardcore)


def ensure_features(
    cfg: ExperimentConfig,
    process: str,
    count: int,
    out_dir: str | os.PathLike,
    jobs: int = 1,
) -> tuple[list[tuple[str, int, FeatureVector]], dict, Path]:
    """Summary vectors for the first count realizations of a process.

    Cached as a feature CSV under out_dir; the cache key covers the
    simulator parameters, observation margin, hard core and master seed.
    """
    out_dir = Path(out_dir)
    params, cal_info = resolve_params(cfg, process, out_dir)
    name = (
        f"{process}-{_key(cfg.window, params, cfg.margin, cfg.hardcore)}"
        f"-s{cfg.master_seed & (2**64 - 1):016x}-n{count}.csv"
    )
    csv_path = out_dir / "features" / name
    if csv_path.exists():
        rows = read_feature_csv(csv_path)
        if len(rows) == count:
            return rows, cal_info, csv_path
    sims, cal_info = ensure_realizations(cfg, process, count, out_dir, jobs)
    vectors = _pmap(_features_one, [(r, cfg.margin, cfg.hardcore) for r in sims], jobs)
    rows = [(process, int(r.seed), fv) for r, fv in zip(sims, vectors)]
    write_feature_csv(csv_path, rows)
    # Return the CSV round trip, not the in-memory vectors: the file stores
    # 12 significant digits, and downstream results must not depend on
    # whether they were served from a warm or cold cache.
    return read_feature_csv(csv_path), cal_info, csv_path


def _pooled_parts(r: Realization, margin: float, hardcore: float):
    obs = observe(r, margin)
    return feature_vector(obs, hardcore), nn_distances(obs)


def ensure_pooled_features(
    cfg: ExperimentConfig,
    process: str,
    groups: int,
    out_dir: str | os.PathLike,
    jobs: int = 1,
) -> tuple[list[tuple[str, int, FeatureVector]], dict, Path]:
    """Pooled vectors for consecutive groups of group_size realizations.

    The row seed is the seed of the group's first realization.
    """
    out_dir = Path(out_dir)
    count = groups * cfg.group_size
    params, cal_info = resolve_params(cfg, process, out_dir)
    name = (
        f"{process}-pooled-{_key(cfg.window, params, cfg.margin, cfg.hardcore, cfg.group_size)}"
        f"-s{cfg.master_seed & (2**64 - 1):016x}-n{groups}.csv"
    )
    csv_path = out_dir / "features" / name
    if csv_path.exists():
        rows = read_feature_csv(csv_path)
        if len(rows) == groups:
            return rows, cal_info, csv_path
    sims, cal_info = ensure_realizations(cfg, process, count, out_dir, jobs)
    parts = _pmap(_pooled_parts, [(r, cfg.margin, cfg.hardcore) for r in sims], jobs)
    rows = []
    for g in range(groups):
        chunk = parts[g * cfg.group_size : (g + 1) * cfg.group_size]
        fv = combine_pooled([c[0] for c in chunk], [c[1] for c in chunk], cfg.hardcore)
        rows.append((process, int(sims[g * cfg.group_size].seed), fv))
    write_feature_csv(csv_path, rows)
    # Same warm/cold equivalence as ensure_features.
    return read_feature_csv(csv_path), cal_info, csv_path


# --------------------------------------------------------------------------
# Training, scoring, reporting


@dataclass(frozen=True)
class ClassResult:
    total: int
    errors: int
    rate: float
    ci_lo: float
    ci_hi: float

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "errors": self.errors,
            "rate": self.rate,
            "ci": [self.ci_lo, self.ci_hi],
        }


def _class_result(errors: int, total: int, level: float = 0.95) -> ClassResult:
    lo, hi = clopper_pearson(errors, total, level)
    return ClassResult(total, errors, errors / total, lo, hi)


@dataclass(frozen=True)
class ExperimentReport:
    """Per-class training and test errors with exact intervals.

    wall_clock_s is informational only and deliberately excluded from
    to_dict()/to_json() so reports are byte-identical across reruns and
    worker counts.
    """

    kind: str
    config: dict
    classes: tuple[str, str]
    classifier: str
    features: tuple[str, ...]
    calibration: dict
    train: dict[str, ClassResult]
    test: dict[str, ClassResult]
    feature_files: tuple[str, ...]
    extra: dict = field(default_factory=dict)
    wall_clock_s: float | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "config": self.config,
            "classes": list(self.classes),
            "classifier": self.classifier,
            "features": list(self.features),
            "calibration": self.calibration,
            "train": {k: v.to_dict() for k, v in self.train.items()},
            "test": {k: v.to_dict() for k, v in self.test.items()},
            "feature_files": list(self.feature_files),
            "extra": self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def text_table(report: ExperimentReport) -> str:
    """Aligned plain-text rendering of a report."""
    lines = [
        f"experiment: {report.kind}    classifier: {report.classifier}",
        f"classes: {report.classes[0]} (0) vs {report.classes[1]} (1)",
        f"features: {', '.join(report.features)}",
        "",
        f"{'class':<14} {'split':<6} {'errors':>9} {'rate':>8} {'95% CI':>18}",
    ]
    for split_name, block in (("train", report.train), ("test", report.test)):
        for cls in report.classes:
            res = block[cls]
            ci = f"[{res.ci_lo:.3f}, {res.ci_hi:.3f}]"
            lines.append(
                f"{cls:<14} {split_name:<6} {res.errors:>4}/{res.total:<4} "
                f"{res.rate:>8.3f} {ci:>18}"
            )
    return "\n".join(lines) + "\n"


def _columns(cfg: ExperimentConfig) -> list[int]:
    return [FEATURE_NAMES.index(name) for name in cfg.feature_names]


def _rows_to_matrix(rows: Sequence[tuple[str, int, FeatureVector]], cols: list[int]):
    return np.array([row[2].to_array()[cols] for row in rows])


def _train_and_score(
    cfg: ExperimentConfig,
    train0: NDArray[np.float64],
    train1: NDArray[np.float64],
    test0: NDArray[np.float64],
    test1: NDArray[np.float64],
) -> tuple[dict, dict, dict]:
    """Standardize, fit the configured classifier, count errors."""
    names = cfg.feature_names
    with threadpool_limits(limits=1):
        std = fit_standardizer(np.vstack([train0, train1]), names)
        z0, z1 = std.apply(train0), std.apply(train1)
        zt0, zt1 = std.apply(test0), std.apply(test1)
        extra: dict = {}
        if cfg.classifier == "lda":
            model = train_lda(z0, z1)
            predict = lambda Z: predict_lda(model, Z)  # noqa: E731
            extra["lda_threshold"] = model.threshold
        elif cfg.classifier == "logistic":
            model = train_logistic(z0, z1)
            predict = lambda Z: predict_logistic(model, Z)  # noqa: E731
            extra["logistic_converged"] = model.converged
            extra["logistic_iterations"] = model.n_iter
        else:
            train_X = np.vstack([z0, z1])
            train_y = np.concatenate([np.zeros(len(z0), np.int64), np.ones(len(z1), np.int64)])
            predict = lambda Z: predict_knn(train_X, train_y, Z, cfg.knn_k)  # noqa: E731
            extra["knn_k"] = cfg.knn_k

        def score(a: NDArray, b: NDArray) -> ConfusionCounts:
            pred = np.concatenate([predict(a), predict(b)])
            truth = np.concatenate([np.zeros(len(a), np.int64), np.ones(len(b), np.int64)])
            return misclassification(pred, truth)

        train_counts = score(z0, z1)
        test_counts = score(zt0, zt1)
    train_res = {
        "cls0": _class_result(train_counts.errors0, train_counts.total0),
        "cls1": _class_result(train_counts.errors1, train_counts.total1),
    }
    test_res = {
        "cls0": _class_result(test_counts.errors0, test_counts.total0),
        "cls1": _class_result(test_counts.errors1, test_counts.total1),
    }
    return train_res, test_res, extra


def _finalize(
    report: ExperimentReport, out_dir: Path, started: float
) -> ExperimentReport:
    report = replace(report, wall_clock_s=time.perf_counter() - started)
    (out_dir / "report.json").write_text(report.to_json())
    (out_dir / "report.txt").write_text(text_table(report))
    with (out_dir / "run.log").open("a") as fh:
        fh.write(f"{report.kind} wall_clock_s {report.wall_clock_s:.3f}\n")
    return report


def run_pair(cfg: ExperimentConfig, out_dir: str | os.PathLike, jobs: int = 1) -> ExperimentReport:
    """Strauss-versus-partner experiment (the pair design).

    Per class: the first n_train vectors train, the next n_test test.
    """
    started = time.perf_counter()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    count = cfg.n_train + cfg.n_test
    cols = _columns(cfg)
    calibration: dict = {}
    matrices = {}
    files = []
    for process in ("strauss", cfg.process_b):
        rows, cal, csv_path = ensure_features(cfg, process, count, out_dir, jobs)
        calibration.update(cal)
        matrices[process] = _rows_to_matrix(rows, cols)
        files.append(os.path.relpath(csv_path, out_dir))
    a = matrices["strauss"]
    b = matrices[cfg.process_b]
    train_res, test_res, extra = _train_and_score(
        cfg,
        a[: cfg.n_train],
        b[: cfg.n_train],
        a[cfg.n_train : count],
        b[cfg.n_train : count],
    )
    classes = ("strauss", cfg.process_b)
    report = ExperimentReport(
        kind="pair",
        config=cfg.to_dict(),
        classes=classes,
        classifier=cfg.classifier,
        features=cfg.feature_names,
        calibration=calibration,
        train={classes[0]: train_res["cls0"], classes[1]: train_res["cls1"]},
        test={classes[0]: test_res["cls0"], classes[1]: test_res["cls1"]},
        feature_files=tuple(files),
        extra=extra,
    )
    return _finalize(report, out_dir, started)


def run_subset(
    cfg: ExperimentConfig,
    features: Sequence[str],
    out_dir: str | os.PathLike,
    jobs: int = 1,
) -> ExperimentReport:
    """run_pair restricted to a feature subset."""
    return run_pair(replace(cfg, features=tuple(features)), out_dir, jobs)


def run_same_model_split(
    cfg: ExperimentConfig, out_dir: str | os.PathLike, jobs: int = 1
) -> ExperimentReport:
    """One process split into two halves and classified against itself.

    Any accuracy beyond guessing would indicate a pipeline leak, so the
    expected test misclassification rate is one half.
    """
    started = time.perf_counter()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    per_half = cfg.split_train + cfg.split_test
    count = 2 * per_half
    cols = _columns(cfg)
    rows, calibration, csv_path = ensure_features(cfg, cfg.process_b, count, out_dir, jobs)
    X = _rows_to_matrix(rows, cols)
    half_a, half_b = X[:per_half], X[per_half:]
    train_res, test_res, extra = _train_and_score(
        cfg,
        half_a[: cfg.split_train],
        half_b[: cfg.split_train],
        half_a[cfg.split_train :],
        half_b[cfg.split_train :],
    )
    classes = (f"{cfg.process_b}-a", f"{cfg.process_b}-b")
    report = ExperimentReport(
        kind="split",
        config=cfg.to_dict(),
        classes=classes,
        classifier=cfg.classifier,
        features=cfg.feature_names,
        calibration=calibration,
        train={classes[0]: train_res["cls0"], classes[1]: train_res["cls1"]},
        test={classes[0]: test_res["cls0"], classes[1]: test_res["cls1"]},
        feature_files=(os.path.relpath(csv_path, out_dir),),
        extra=extra,
    )
    return _finalize(report, out_dir, started)


def run_pooled(
    cfg: ExperimentConfig, out_dir: str | os.PathLike, jobs: int = 1
) -> ExperimentReport:
    """Pair experiment on pooled vectors (groups of group_size realizations)."""
    started = time.perf_counter()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    groups = cfg.pooled_train + cfg.pooled_test
    cols = _columns(cfg)
    calibration: dict = {}
    matrices = {}
    files = []
    for process in ("strauss", cfg.process_b):
        rows, cal, csv_path = ensure_pooled_features(cfg, process, groups, out_dir, jobs)
        calibration.update(cal)
        matrices[process] = _rows_to_matrix(rows, cols)
        files.append(os.path.relpath(csv_path, out_dir))
    a = matrices["strauss"]
    b = matrices[cfg.process_b]
    train_res, test_res, extra = _train_and_score(
        cfg,
        a[: cfg.pooled_train],
        b[: cfg.pooled_train],
        a[cfg.pooled_train : groups],
        b[cfg.pooled_train : groups],
    )
    classes = ("strauss", cfg.process_b)
    report = ExperimentReport(
        kind="pooled",
        config=cfg.to_dict(),
        classes=classes,
        classifier=cfg.classifier,
        features=cfg.feature_names,
        calibration=calibration,
        train={classes[0]: train_res["cls0"], classes[1]: train_res["cls1"]},
        test={classes[0]: test_res["cls0"], classes[1]: test_res["cls1"]},
        feature_files=tuple(files),
        extra=extra,
    )
    return _finalize(report, out_dir, started)


def coverage_check(
    cfg: ExperimentConfig,
    process: str,
    count: int,
    out_dir: str | os.PathLike,
    jobs: int = 1,
    grid_step: float = 0.1,
) -> dict:
    """Mean unit-disc coverage of a batch, measured on the observed window."""
    sims, _ = ensure_realizations(cfg, process, count, out_dir, jobs)
    eroded = cfg.observed_window
    covs = np.array(
        [
            coverage_fraction(r.points, eroded, cfg.disc_radius, grid_step)
            for r in sims
        ]
    )
    return {
        "process": process,
        "count": count,
        "mean": float(covs.mean()),
        "sd": float(covs.std(ddof=1)) if count > 1 else 0.0,
    }


def emit_scatter(
    rows: Sequence[tuple[str, int, FeatureVector]],
    columns: tuple[str, str],
    path: str | os.PathLike,
) -> None:
    """CSV of label plus two chosen feature columns, for scatter plots."""
    for c in columns:
        if c not in FEATURE_NAMES:
            raise ConfigError(f"unknown feature name: {c}")
    idx = [FEATURE_NAMES.index(c) for c in columns]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"label,{columns[0]},{columns[1]}"]
    for label, _seed, fv in rows:
        arr = fv.to_array()
        lines.append(f"{label},{arr[idx[0]]:.12g},{arr[idx[1]]:.12g}")
    path.write_text("\n".join(lines) + "\n")
