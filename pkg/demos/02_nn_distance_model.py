"""The nearest-neighbour distance model behind the first three statistics.

For a pattern with hard core 2, the empirical nearest-neighbour
distribution G(r) is estimated from the observed points (after trimming a
margin so that boundary points do not bias the distances), and
log(1 - G) is regressed on (r - 2) and a shifted Legendre polynomial of
(r - 2), with no intercept.  The fitted slope pair (alpha, beta) and the
residual scale sigma are the first three entries of the feature vector.

A Poisson pattern is fit with the same recipe for contrast: without a
hard core the same regression produces a visibly different (alpha, beta).
"""

import numpy as np

from ppsc.geometry import Window, observe
from ppsc.simulate import PoissonParams, SsiParams, simulate_process
from ppsc.summarize import estimate_G, fit_nn_model, nn_distances

window = Window(0, 0, 44, 44)

ssi = simulate_process(window, SsiParams(2.0, 240, 48_000), seed=7)
poisson = simulate_process(window, PoissonParams(intensity=240 / 44**2), seed=7)

for name, r in [("ssi", ssi), ("poisson", poisson)]:
    inner = observe(r, margin=2.5)
    d = nn_distances(inner)
    g = estimate_G(d)
    fit = fit_nn_model(d, hardcore=2.0)
    print(f"{name}: n_observed {len(inner.points)}, "
          f"nn distances in [{d.min():.3f}, {d.max():.3f}]")
    print(f"  G at the three quartile distances: "
          f"{np.interp([0.25, 0.5, 0.75], g.g_values, g.r_values).round(3)}")
    print(f"  alpha {fit.alpha:+.4f}  beta {fit.beta:+.4f}  sigma {fit.sigma:.4f}")
    print()

# The model is exactly solvable with two distances, which makes a handy
# cross-check of the design matrix conventions: distances {3, 4} give
# responses log(2/3), log(1/3) at design rows [1, L2(1)], [2, L2(2)].
hand = fit_nn_model(np.array([3.0, 4.0]), hardcore=2.0)
print(f"two-distance hand case: alpha {hand.alpha:.4f} (expect -0.3233), "
      f"beta {hand.beta:.4f} (expect -0.0822), sigma {hand.sigma:.1f}")

# The Poisson fit is mechanical (the regression never looks at the hard
# core), but the numbers tell the story: the regular pattern has a much
# steeper alpha and a far smaller residual scale sigma, because all of its
# nearest-neighbour mass sits just above the exclusion distance.
