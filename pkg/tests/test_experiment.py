"""Experiment orchestration at desk scale: config validation and parsing,
cache layout, report structure, and determinism of the three designs.

The runs here use a small window, short chains and single-digit batch
sizes so the whole file stays fast; the production-scale protocol is
exercised by the acceptance suite.
"""

import json
from dataclasses import replace

import numpy as np
import pytest

from ppsc.classify import clopper_pearson
from ppsc.errors import ConfigError
from ppsc.experiment import (
    ClassResult,
    ExperimentConfig,
    ExperimentReport,
    config_from_file,
    coverage_check,
    emit_scatter,
    ensure_features,
    ensure_realizations,
    resolve_params,
    run_pair,
    run_pooled,
    run_same_model_split,
    run_subset,
    text_table,
)
from ppsc.simulate import DeadLeavesParams, SsiParams, StraussHcParams
from ppsc.summarize import FEATURE_NAMES, FeatureVector


def desk_config(**kw) -> ExperimentConfig:
    base = dict(
        process_b="ssi",
        classifier="lda",
        master_seed=7,
        n_train=8,
        n_test=4,
        split_train=8,
        split_test=3,
        pooled_train=7,
        pooled_test=2,
        group_size=2,
        window_size=18.0,
        margin=2.5,
        sweeps=60,
        calibration_pilots=4,
        calibration_tol=0.05,
        calibration_step=0.5,
    )
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfigValidation:
    def test_bad_process(self):
        with pytest.raises(ConfigError, match="process_b"):
            ExperimentConfig(process_b="poisson")

    def test_bad_classifier(self):
        with pytest.raises(ConfigError, match="classifier"):
            ExperimentConfig(classifier="tree")

    def test_unknown_feature(self):
        with pytest.raises(ConfigError, match="unknown feature names: gamma"):
            ExperimentConfig(features=("alpha", "gamma"))

    def test_empty_feature_subset(self):
        with pytest.raises(ConfigError, match="must not be empty"):
            ExperimentConfig(features=())

    def test_duplicate_features(self):
        with pytest.raises(ConfigError, match="duplicates"):
            ExperimentConfig(features=("alpha", "alpha"))

    def test_counts_positive(self):
        with pytest.raises(ConfigError, match="n_train"):
            ExperimentConfig(n_train=0)

    def test_margin_versus_window(self):
        with pytest.raises(ConfigError, match="margin too large"):
            ExperimentConfig(window_size=4.0, margin=2.5)

    def test_coverage_targets(self):
        with pytest.raises(ConfigError, match="coverage"):
            ExperimentConfig(ssi_coverage=1.5)

    def test_full_tuple_normalizes_to_none(self):
        cfg = ExperimentConfig(features=FEATURE_NAMES)
        assert cfg.features is None
        assert cfg.feature_names == FEATURE_NAMES

    def test_subset_preserved_in_order(self):
        cfg = ExperimentConfig(features=("sigma", "alpha"))
        assert cfg.features == ("sigma", "alpha")
        assert cfg.feature_names == ("sigma", "alpha")

    def test_windows(self):
        cfg = ExperimentConfig()
        assert cfg.window.area == pytest.approx(44.0**2)
        obs = cfg.observed_window
        assert (obs.xmin, obs.xmax) == (2.5, 41.5)

    def test_to_dict_features(self):
        assert ExperimentConfig().to_dict()["features"] is None
        assert ExperimentConfig(features=("alpha",)).to_dict()["features"] == ["alpha"]


class TestConfigFromFile:
    def test_parse_and_overrides(self, tmp_path):
        p = tmp_path / "exp.cfg"
        p.write_text(
            "# experiment setup\n"
            "process_b dl\n"
            "classifier knn\n"
            "features alpha, beta,sigma\n"
            "n_train 12\n"
            "window_size 20\n"
            "\n"
            "master_seed 3\n"
        )
        cfg = config_from_file(p, master_seed=9)
        assert cfg.process_b == "dl"
        assert cfg.classifier == "knn"
        assert cfg.features == ("alpha", "beta", "sigma")
        assert cfg.n_train == 12 and isinstance(cfg.n_train, int)
        assert cfg.window_size == 20.0
        assert cfg.master_seed == 9  # override beats the file

    def test_features_all(self, tmp_path):
        p = tmp_path / "exp.cfg"
        p.write_text("features all\n")
        assert config_from_file(p).features is None

    def test_unknown_key(self, tmp_path):
        p = tmp_path / "exp.cfg"
        p.write_text("bogus 3\n")
        with pytest.raises(ConfigError, match="exp.cfg:1.*bogus"):
            config_from_file(p)

    def test_missing_value(self, tmp_path):
        p = tmp_path / "exp.cfg"
        p.write_text("n_train\n")
        with pytest.raises(ConfigError, match="missing value"):
            config_from_file(p)

    def test_invalid_value_propagates(self, tmp_path):
        p = tmp_path / "exp.cfg"
        p.write_text("process_b poisson\n")
        with pytest.raises(ConfigError, match="process_b"):
            config_from_file(p)


class TestResolveParams:
    def test_dl_needs_no_calibration(self, tmp_path):
        params, info = resolve_params(desk_config(), "dl", tmp_path)
        assert isinstance(params, DeadLeavesParams)
        assert info["dl"]["disc_radius"] == 1.0
        assert not (tmp_path / "calibration").exists()

    def test_ssi_target_count(self, tmp_path):
        cfg = desk_config()
        params, info = resolve_params(cfg, "ssi", tmp_path)
        assert isinstance(params, SsiParams)
        assert params.target_n == info["ssi"]["target_n"] > 0
        # Achieved coverage lands near the configured target.
        assert abs(info["ssi"]["coverage"] - cfg.ssi_coverage) < 0.08

    def test_strauss_matches_partner_coverage(self, tmp_path):
        cfg = desk_config()
        params, info = resolve_params(cfg, "strauss", tmp_path)
        assert isinstance(params, StraussHcParams)
        target = info["strauss"]["coverage_target"]
        assert abs(info["strauss"]["coverage"] - target) <= cfg.calibration_tol
        # Second resolve is served from the calibration cache.
        params2, _ = resolve_params(cfg, "strauss", tmp_path)
        assert params2 == params

    def test_unknown_process(self, tmp_path):
        with pytest.raises(ConfigError, match="unknown process"):
            resolve_params(desk_config(), "cox", tmp_path)


@pytest.fixture(scope="class")
def pair_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("pair")
    cfg = desk_config()
    report = run_pair(cfg, out, jobs=1)
    return cfg, out, report


class TestRunPair:
    def assert_ci_consistent(self, report):
        for block in (report.train, report.test):
            for res in block.values():
                assert res.rate == res.errors / res.total
                lo, hi = clopper_pearson(res.errors, res.total)
                assert (res.ci_lo, res.ci_hi) == (lo, hi)

    def test_report_shape(self, pair_run):
        cfg, out, report = pair_run
        assert report.kind == "pair"
        assert report.classes == ("strauss", "ssi")
        assert report.features == FEATURE_NAMES
        assert set(report.train) == set(report.test) == {"strauss", "ssi"}
        for res in report.train.values():
            assert res.total == cfg.n_train
        for res in report.test.values():
            assert res.total == cfg.n_test
        assert "lda_threshold" in report.extra
        self.assert_ci_consistent(report)

    def test_artifacts_on_disk(self, pair_run):
        cfg, out, report = pair_run
        assert (out / "report.json").read_text() == report.to_json()
        assert (out / "report.txt").read_text() == text_table(report)
        assert "wall_clock_s" in (out / "run.log").read_text()
        assert len(report.feature_files) == 2
        for rel in report.feature_files:
            assert (out / rel).exists()
        # One realization file per simulated pattern, per process.
        sim_dirs = sorted((out / "sims").iterdir())
        assert len(sim_dirs) == 2
        for d in sim_dirs:
            assert len(list(d.glob("r*.txt"))) == cfg.n_train + cfg.n_test

    def test_rerun_is_byte_identical(self, pair_run):
        cfg, out, report = pair_run
        again = run_pair(cfg, out, jobs=1)
        assert again.to_json() == report.to_json()

    def test_run_subset_all_features_identical(self, pair_run):
        cfg, out, report = pair_run
        sub = run_subset(cfg, FEATURE_NAMES, out, jobs=1)
        assert sub.to_json() == report.to_json()

    def test_run_subset_restricts_columns(self, pair_run):
        cfg, out, _ = pair_run
        sub = run_subset(cfg, ("alpha", "beta", "sigma"), out, jobs=1)
        assert sub.features == ("alpha", "beta", "sigma")
        assert sub.config["features"] == ["alpha", "beta", "sigma"]
        self.assert_ci_consistent(sub)

    def test_other_classifiers_reuse_features(self, pair_run):
        cfg, out, _ = pair_run
        before = {p.name for p in (out / "features").iterdir()}
        knn = run_pair(replace(cfg, classifier="knn"), out, jobs=1)
        logit = run_pair(replace(cfg, classifier="logistic"), out, jobs=1)
        after = {p.name for p in (out / "features").iterdir()}
        assert before == after  # cache key ignores the classifier
        assert knn.extra["knn_k"] == 5
        assert "logistic_converged" in logit.extra
        self.assert_ci_consistent(knn)
        self.assert_ci_consistent(logit)


class TestRunSplit:
    def test_split_structure_and_determinism(self, tmp_path):
        cfg = desk_config()
        report = run_same_model_split(cfg, tmp_path, jobs=1)
        assert report.kind == "split"
        assert report.classes == ("ssi-a", "ssi-b")
        for res in report.train.values():
            assert res.total == cfg.split_train
        for res in report.test.values():
            assert res.total == cfg.split_test
        assert len(report.feature_files) == 1
        again = run_same_model_split(cfg, tmp_path, jobs=1)
        assert again.to_json() == report.to_json()


class TestRunPooled:
    def test_pooled_structure(self, tmp_path):
        cfg = desk_config()
        report = run_pooled(cfg, tmp_path, jobs=1)
        assert report.kind == "pooled"
        groups = cfg.pooled_train + cfg.pooled_test
        for res in report.train.values():
            assert res.total == cfg.pooled_train
        for res in report.test.values():
            assert res.total == cfg.pooled_test
        # group_size realizations are consumed per pooled vector.
        for d in (tmp_path / "sims").iterdir():
            assert len(list(d.glob("r*.txt"))) == groups * cfg.group_size

    def test_pooled_extends_pair_sims(self, tmp_path):
        # The designs share one realization store: a pooled run after a
        # pair run only adds the patterns beyond the pair's count.
        cfg = desk_config()
        run_pair(cfg, tmp_path, jobs=1)
        pair_counts = {
            d.name: len(list(d.glob("r*.txt"))) for d in (tmp_path / "sims").iterdir()
        }
        assert set(pair_counts.values()) == {cfg.n_train + cfg.n_test}
        run_pooled(cfg, tmp_path, jobs=1)
        pooled_needed = (cfg.pooled_train + cfg.pooled_test) * cfg.group_size
        after = {
            d.name: len(list(d.glob("r*.txt"))) for d in (tmp_path / "sims").iterdir()
        }
        assert set(after) == set(pair_counts)  # same directories, extended
        assert set(after.values()) == {max(cfg.n_train + cfg.n_test, pooled_needed)}


class TestCoverageCheck:
    def test_mean_and_shape(self, tmp_path):
        cfg = desk_config()
        out = coverage_check(cfg, "ssi", 4, tmp_path, grid_step=0.25)
        assert out["process"] == "ssi"
        assert out["count"] == 4
        assert 0.0 < out["mean"] < 1.0
        assert out["sd"] >= 0.0


class TestEmitScatter:
    def rows(self):
        fv = FeatureVector.from_array(np.arange(10.0))
        return [("ssi", 1, fv), ("strauss", 2, fv)]

    def test_two_columns(self, tmp_path):
        path = tmp_path / "scatter.csv"
        emit_scatter(self.rows(), ("alpha", "beta"), path)
        lines = path.read_text().splitlines()
        assert lines[0] == "label,alpha,beta"
        assert lines[1] == "ssi,0,1"
        assert lines[2] == "strauss,0,1"

    def test_empty_rows_header_only(self, tmp_path):
        path = tmp_path / "scatter.csv"
        emit_scatter([], ("max_side", "eig1"), path)
        assert path.read_text() == "label,max_side,eig1\n"

    def test_unknown_column(self, tmp_path):
        with pytest.raises(ConfigError, match="unknown feature name"):
            emit_scatter(self.rows(), ("alpha", "gamma"), tmp_path / "s.csv")


class TestTextTable:
    def test_rendering(self):
        res = ClassResult(total=100, errors=18, rate=0.18, ci_lo=0.1103, ci_hi=0.2695)
        report = ExperimentReport(
            kind="pair",
            config={},
            classes=("strauss", "dl"),
            classifier="lda",
            features=("alpha", "beta"),
            calibration={},
            train={"strauss": res, "dl": res},
            test={"strauss": res, "dl": res},
            feature_files=(),
        )
        txt = text_table(report)
        assert "experiment: pair" in txt
        assert "strauss (0) vs dl (1)" in txt
        assert "features: alpha, beta" in txt
        assert "  18/100 " in txt
        assert "[0.110, 0.270]" in txt  # 3-decimal rendering
        assert txt.count("\n") == 9


class TestFeatureCacheRoundTrip:
    def test_cached_rows_equal_fresh(self, tmp_path):
        cfg = desk_config()
        rows, _, csv_path = ensure_features(cfg, "ssi", 5, tmp_path, jobs=1)
        rows2, _, csv_path2 = ensure_features(cfg, "ssi", 5, tmp_path, jobs=1)
        assert csv_path2 == csv_path
        for (l1, s1, f1), (l2, s2, f2) in zip(rows, rows2):
            assert (l1, s1) == (l2, s2)
            assert np.allclose(f1.to_array(), f2.to_array(), rtol=1e-11, atol=1e-14)

    def test_seeds_follow_master_seed_and_index(self, tmp_path):
        from ppsc.rng import mix_seed

        cfg = desk_config()
        sims, _ = ensure_realizations(cfg, "ssi", 3, tmp_path, jobs=1)
        for i, r in enumerate(sims):
            assert r.seed == mix_seed(cfg.master_seed, "ssi", i)
