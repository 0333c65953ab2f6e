"""A complete pair experiment at desk scale, in a few seconds.

run_pair simulates labeled realizations of two processes (a target process
versus the Strauss hard-core reference), reduces each to the 10-statistic
feature vector, trains a classifier on standardized features, and reports
per-class misclassification with exact binomial confidence intervals.  The
run directory caches simulations and features, so trying another
classifier on the same pairing only pays for training.
"""

import tempfile

from ppsc.experiment import ExperimentConfig, run_pair, text_table


def desk_config(process_b, classifier="lda"):
    # Tiny counts and a small window keep this to seconds; the reference
    # scale (window 44, 300+300 train / 100+100 test) lives in demo 05.
    return ExperimentConfig(
        process_b=process_b,
        classifier=classifier,
        master_seed=7,
        n_train=40, n_test=20,
        window_size=24.0, sweeps=150,
        calibration_pilots=6, calibration_tol=0.03, calibration_step=0.3,
    )


with tempfile.TemporaryDirectory() as run_dir:
    # Diggle-Gratton vs Strauss separates cleanly even at this scale.
    report = run_pair(desk_config("dg"), run_dir)
    print(text_table(report))

    print("same simulations, other classifiers:")
    for clf in ("logistic", "knn"):
        rep = run_pair(desk_config("dg", clf), run_dir)
        per_class = ", ".join(
            f"{cls} {res.errors}/{res.total}" for cls, res in rep.test.items()
        )
        print(f"  {clf:<9} test errors: {per_class}")

    # SSI vs Strauss is the hard pairing: both are pure hard-core patterns,
    # so only the finer geometry separates them, and desk scale is noisy.
    rep = run_pair(desk_config("ssi"), run_dir)
    per_class = ", ".join(
        f"{cls} {res.errors}/{res.total}" for cls, res in rep.test.items()
    )
    print(f"\nharder pairing (ssi vs strauss), lda test errors: {per_class}")
