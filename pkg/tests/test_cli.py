"""Command line behaviour: each subcommand in process, the documented
exit codes, and one console-script round trip through a real shell.
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from ppsc.cli import main
from ppsc.errors import NumericalError
from ppsc.patternio import read_batch
from ppsc.rng import mix_seed
from ppsc.summarize import FEATURE_NAMES, FeatureVector, read_feature_csv, write_feature_csv

DESK_CONFIG = """\
# desk-scale experiment settings
process_b ssi
classifier lda
master_seed 7
n_train 8
n_test 4
split_train 8
split_test 3
pooled_train 7
pooled_test 2
group_size 2
window_size 18
margin 2.5
sweeps 60
calibration_pilots 4
calibration_tol 0.05
calibration_step 0.5
"""


@pytest.fixture
def desk_cfg_file(tmp_path):
    p = tmp_path / "desk.cfg"
    p.write_text(DESK_CONFIG)
    return p


def synthetic_feature_csv(path, n_per_class=12, gap=5.0, labels=("dl", "strauss")):
    rng = np.random.default_rng(11)
    rows = []
    for shift, label in zip((0.0, gap), labels):
        for i in range(n_per_class):
            vec = shift + rng.normal(0, 0.3, size=10)
            rows.append((label, 1000 + i, FeatureVector.from_array(vec)))
    write_feature_csv(path, rows)
    return path


class TestSimulate:
    def test_poisson_batch(self, tmp_path, capsys):
        out = tmp_path / "batch"
        code = main([
            "simulate", "--process", "poisson", "--n", "3",
            "--activity", "0.02", "--out", str(out),
        ])
        assert code == 0
        assert "wrote 3 realizations" in capsys.readouterr().out
        batch = read_batch(out)
        assert len(batch) == 3
        assert all(r.label == "poisson" for r in batch)
        assert [r.seed for r in batch] == [mix_seed(1, "poisson", i) for i in range(3)]

    def test_poisson_requires_activity(self, tmp_path, capsys):
        code = main([
            "simulate", "--process", "poisson", "--n", "1", "--out", str(tmp_path / "x"),
        ])
        assert code == 2
        assert "requires --activity" in capsys.readouterr().err

    def test_strauss_requires_activity(self, tmp_path):
        assert main([
            "simulate", "--process", "strauss", "--n", "1", "--out", str(tmp_path / "x"),
        ]) == 2

    def test_ssi_with_config(self, tmp_path, desk_cfg_file):
        out = tmp_path / "ssi"
        code = main([
            "simulate", "--config", str(desk_cfg_file), "--process", "ssi",
            "--n", "4", "--seed", "12", "--out", str(out),
        ])
        assert code == 0
        batch = read_batch(out)
        assert len(batch) == 4
        for i, r in enumerate(batch):
            assert r.window.xmax == 18.0
            assert r.seed == mix_seed(12, "ssi", i)


class TestFeatures:
    @pytest.fixture
    def ssi_batch(self, tmp_path, desk_cfg_file):
        out = tmp_path / "ssi"
        assert main([
            "simulate", "--config", str(desk_cfg_file), "--process", "ssi",
            "--n", "4", "--seed", "12", "--out", str(out),
        ]) == 0
        return out

    def test_plain_features(self, ssi_batch, tmp_path):
        csv = tmp_path / "f.csv"
        assert main(["features", "--in", str(ssi_batch), "--out", str(csv)]) == 0
        rows = read_feature_csv(csv)
        assert len(rows) == 4
        assert all(label == "ssi" for label, _, _ in rows)
        assert all(np.isfinite(fv.to_array()).all() for _, _, fv in rows)

    def test_pooled_features(self, ssi_batch, tmp_path):
        csv = tmp_path / "fp.csv"
        assert main([
            "features", "--in", str(ssi_batch), "--out", str(csv), "--pool", "2",
        ]) == 0
        assert len(read_feature_csv(csv)) == 2

    def test_pool_must_divide(self, ssi_batch, tmp_path, capsys):
        code = main([
            "features", "--in", str(ssi_batch), "--out", str(tmp_path / "f.csv"),
            "--pool", "3",
        ])
        assert code == 2
        assert "does not divide" in capsys.readouterr().err

    def test_missing_input_dir(self, tmp_path):
        assert main([
            "features", "--in", str(tmp_path / "nope"), "--out", str(tmp_path / "f.csv"),
        ]) == 2


class TestTrainEvaluate:
    def test_round_trip(self, tmp_path, capsys):
        csv = synthetic_feature_csv(tmp_path / "f.csv")
        model = tmp_path / "model.txt"
        assert main(["train", "--features", str(csv), "--out", str(model)]) == 0
        assert "trained lda on 12 + 12 rows" in capsys.readouterr().out

        report_path = tmp_path / "eval.json"
        code = main([
            "evaluate", "--model", str(model), "--features", str(csv),
            "--out", str(report_path),
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "dl" in out and "strauss" in out
        report = json.loads(report_path.read_text())
        assert report["kind"] == "evaluate"
        # The classes are far apart, so training data scores perfectly.
        for label in ("dl", "strauss"):
            assert report["test"][label]["errors"] == 0
            assert report["test"][label]["ci"][0] == 0.0

    def test_feature_subset(self, tmp_path):
        csv = synthetic_feature_csv(tmp_path / "f.csv")
        model = tmp_path / "model.txt"
        assert main([
            "train", "--features", str(csv), "--out", str(model),
            "--feature-subset", "alpha,beta,sigma",
        ]) == 0
        assert main(["evaluate", "--model", str(model), "--features", str(csv)]) == 0

    def test_only_lda_persists(self, tmp_path):
        csv = synthetic_feature_csv(tmp_path / "f.csv")
        assert main([
            "train", "--features", str(csv), "--out", str(tmp_path / "m.txt"),
            "--classifier", "knn",
        ]) == 2

    def test_unknown_subset_name(self, tmp_path):
        csv = synthetic_feature_csv(tmp_path / "f.csv")
        assert main([
            "train", "--features", str(csv), "--out", str(tmp_path / "m.txt"),
            "--feature-subset", "alpha,gamma",
        ]) == 2

    def test_single_label_rejected(self, tmp_path):
        csv = synthetic_feature_csv(tmp_path / "f.csv", labels=("dl", "dl"))
        assert main([
            "train", "--features", str(csv), "--out", str(tmp_path / "m.txt"),
        ]) == 2

    def test_label_mismatch_on_evaluate(self, tmp_path):
        train_csv = synthetic_feature_csv(tmp_path / "train.csv")
        other_csv = synthetic_feature_csv(tmp_path / "other.csv", labels=("dl", "ssi"))
        model = tmp_path / "m.txt"
        assert main(["train", "--features", str(train_csv), "--out", str(model)]) == 0
        assert main(["evaluate", "--model", str(model), "--features", str(other_csv)]) == 2


class TestExperimentCommands:
    def test_pair_split_pooled(self, tmp_path, desk_cfg_file, capsys):
        out = tmp_path / "run"
        code = main([
            "pair", "--config", str(desk_cfg_file), "--seed", "7", "--out", str(out),
        ])
        assert code == 0
        assert "experiment: pair" in capsys.readouterr().out
        assert (out / "report.json").exists()

        code = main([
            "split", "--config", str(desk_cfg_file), "--seed", "7", "--out", str(out),
        ])
        assert code == 0
        assert "experiment: split" in capsys.readouterr().out

        code = main([
            "pooled", "--config", str(desk_cfg_file), "--seed", "7", "--out", str(out),
            "--features", "alpha,beta,sigma",
        ])
        assert code == 0
        table = capsys.readouterr().out
        assert "experiment: pooled" in table
        assert "features: alpha, beta, sigma" in table

    def test_flag_overrides_config(self, tmp_path, desk_cfg_file):
        out = tmp_path / "run"
        code = main([
            "pair", "--config", str(desk_cfg_file), "--seed", "7", "--out", str(out),
            "--classifier", "knn", "--features", "alpha,beta,sigma",
        ])
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["classifier"] == "knn"
        assert report["features"] == ["alpha", "beta", "sigma"]

    def test_bad_config_value(self, tmp_path, desk_cfg_file):
        assert main([
            "pair", "--config", str(desk_cfg_file), "--seed", "7",
            "--out", str(tmp_path / "x"), "--features", "alpha,alpha",
        ]) == 2


class TestScatter:
    def test_default_columns(self, tmp_path):
        csv = synthetic_feature_csv(tmp_path / "f.csv")
        out = tmp_path / "scatter.csv"
        assert main(["scatter", "--features", str(csv), "--out", str(out)]) == 0
        assert out.read_text().splitlines()[0] == "label,alpha,beta"

    def test_chosen_columns(self, tmp_path):
        csv = synthetic_feature_csv(tmp_path / "f.csv")
        out = tmp_path / "scatter.csv"
        assert main([
            "scatter", "--features", str(csv), "--columns", "eig1,eig2",
            "--out", str(out),
        ]) == 0
        assert out.read_text().splitlines()[0] == "label,eig1,eig2"

    def test_column_count_validated(self, tmp_path):
        csv = synthetic_feature_csv(tmp_path / "f.csv")
        assert main([
            "scatter", "--features", str(csv), "--columns", "alpha",
            "--out", str(tmp_path / "s.csv"),
        ]) == 2

    def test_unknown_column(self, tmp_path):
        csv = synthetic_feature_csv(tmp_path / "f.csv")
        assert main([
            "scatter", "--features", str(csv), "--columns", "alpha,gamma",
            "--out", str(tmp_path / "s.csv"),
        ]) == 2


class TestExitCodes:
    """The dispatcher maps error families to the documented codes."""

    def test_numerical_failure_is_3(self, monkeypatch, tmp_path, capsys):
        import ppsc.cli as cli

        def boom(args):
            raise NumericalError("synthetic numerical failure")

        monkeypatch.setattr(cli, "_cmd_scatter", boom)
        csv = synthetic_feature_csv(tmp_path / "f.csv")
        code = cli.main([
            "scatter", "--features", str(csv), "--out", str(tmp_path / "s.csv"),
        ])
        assert code == 3
        assert "numerical failure" in capsys.readouterr().err

    def test_linalg_error_is_3(self, monkeypatch, tmp_path):
        import ppsc.cli as cli

        monkeypatch.setattr(
            cli, "_cmd_scatter",
            lambda args: (_ for _ in ()).throw(np.linalg.LinAlgError("singular")),
        )
        csv = synthetic_feature_csv(tmp_path / "f.csv")
        assert cli.main([
            "scatter", "--features", str(csv), "--out", str(tmp_path / "s.csv"),
        ]) == 3

    def test_value_error_is_2(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("nonsense\n")
        assert main([
            "scatter", "--features", str(bad), "--out", str(tmp_path / "s.csv"),
        ]) == 2

    def test_usage_error_exits_via_argparse(self):
        with pytest.raises(SystemExit) as exc:
            main(["simulate"])  # missing required flags
        assert exc.value.code == 2


class TestConsoleScript:
    def test_end_to_end_subprocess(self, tmp_path):
        batch = tmp_path / "batch"
        r1 = subprocess.run(
            ["ppsc", "simulate", "--process", "poisson", "--n", "2",
             "--activity", "0.02", "--out", str(batch)],
            capture_output=True, text=True,
        )
        assert r1.returncode == 0, r1.stderr
        csv = tmp_path / "f.csv"
        r2 = subprocess.run(
            ["ppsc", "features", "--in", str(batch), "--out", str(csv)],
            capture_output=True, text=True,
        )
        assert r2.returncode == 0, r2.stderr
        assert len(read_feature_csv(csv)) == 2

    def test_module_invocation_help(self):
        r = subprocess.run(
            [sys.executable, "-m", "ppsc.cli", "--help"],
            capture_output=True, text=True,
        )
        assert r.returncode == 0
        assert "simulate" in r.stdout and "pooled" in r.stdout
