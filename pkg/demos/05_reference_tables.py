"""All three experiment designs for all three pairings, in one run.

For each target process (dead leaves, SSI, Diggle-Gratton) against the
Strauss hard-core reference this script runs:

  pair    two-process discrimination (the headline result),
  split   one process against itself, the control that should sit at
          chance level with confidence intervals covering 0.5,
  pooled  five realizations per decision, which drives error rates down.

By default everything runs at desk scale (window 24, tens of
realizations): about half a minute in total.  --full switches to the
reference scale (window 44, 400 realizations per process and pairing),
which takes a long time cold; point --out at an existing run directory
(or set PPSC_ACCEPTANCE_CACHE) to reuse simulations across invocations.
"""

import argparse
import os
import tempfile

from ppsc.experiment import (
    ExperimentConfig,
    run_pair,
    run_pooled,
    run_same_model_split,
    text_table,
)


def config(process_b, full, master_seed):
    if full:
        return ExperimentConfig(process_b=process_b, master_seed=master_seed)
    # Desk scale, with counts chosen so pair, split and pooled all consume
    # the same 60 realizations per process: 40+20 for the pair, 30+30 for
    # the split halves, and (8+4) groups of 5 for pooling.
    return ExperimentConfig(
        process_b=process_b,
        master_seed=master_seed,
        n_train=40, n_test=20,
        split_train=15, split_test=15,
        pooled_train=8, pooled_test=4, group_size=5,
        window_size=24.0, sweeps=150,
        calibration_pilots=6, calibration_tol=0.03, calibration_step=0.3,
    )


def one_line(report):
    return ", ".join(
        f"{cls} {res.errors}/{res.total} ci [{res.ci_lo:.3f}, {res.ci_hi:.3f}]"
        for cls, res in report.test.items()
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--full", action="store_true", help="reference scale instead of desk scale")
    ap.add_argument("--seed", type=int, default=1, help="master seed (default 1)")
    ap.add_argument("--jobs", type=int, default=1, help="parallel workers for simulation")
    ap.add_argument("--out", default=None, help="run directory to create or reuse")
    args = ap.parse_args()

    out = args.out or os.environ.get("PPSC_ACCEPTANCE_CACHE" if args.full else "", "")
    tmp = None
    if not out:
        tmp = tempfile.TemporaryDirectory()
        out = tmp.name

    scale = "reference" if args.full else "desk"
    print(f"{scale} scale, master seed {args.seed}, run directory {out}\n")

    for pb in ("dl", "ssi", "dg"):
        pair = run_pair(config(pb, args.full, args.seed), out, jobs=args.jobs)
        print(text_table(pair))
        split = run_same_model_split(config(pb, args.full, args.seed), out, jobs=args.jobs)
        print(f"control ({pb} vs itself):  {one_line(split)}")
        pooled = run_pooled(config(pb, args.full, args.seed), out, jobs=args.jobs)
        print(f"pooled in groups of {pooled.config['group_size']}: {one_line(pooled)}")
        print()

    if tmp is not None:
        tmp.cleanup()


if __name__ == "__main__":
    main()
