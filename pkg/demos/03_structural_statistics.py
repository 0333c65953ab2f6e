"""Statistics built on the Delaunay triangulation and the disc union.

The remaining seven feature-vector entries come from the triangulation of
the observed points: triangle density and the largest side / angle / area,
plus the top three adjacency eigenvalues.  This script also shows two
related quantities that are useful diagnostics even though they are not
part of the classifier's vector: the bulk resistance of the triangulation
treated as a circuit (edges are unit-resistance-per-length wires) and the
low-order coverage moments of the union of unit discs.
"""

import numpy as np

from ppsc.geometry import Window, observe
from ppsc.moments import moment_estimates
from ppsc.resistance import resistance_summary
from ppsc.simulate import SsiParams, simulate_process
from ppsc.summarize import feature_vector, spectral_summary, triangulation_summary
from ppsc.triangulate import adjacency, char_poly_coeffs, delaunay, triangle_count_spectral

window = Window(0, 0, 44, 44)
r = simulate_process(window, SsiParams(2.0, 240, 48_000), seed=11)
inner = observe(r, margin=2.5)

t = delaunay(inner)
ts = triangulation_summary(t, inner.window)
print(f"triangulation: {t.n_vertices} vertices, {len(t.edges)} edges, "
      f"{len(t.triangles)} triangles")
print(f"  density {ts.tri_density:.4f} per unit area, max side {ts.max_side:.3f}, "
      f"max angle {np.degrees(ts.max_angle):.1f} deg, max area {ts.max_area:.3f}")

# The adjacency spectrum doubles as an exact triangle counter: the third
# characteristic-polynomial coefficient is -2 times the triangle count of
# the graph (which exceeds the face count whenever hull chords appear).
ss = spectral_summary(t)
print(f"  top eigenvalues {ss.eig1:.4f}, {ss.eig2:.4f}, {ss.eig3:.4f}")
small = adjacency(delaunay(observe(r, margin=18.0)))
print(f"  triangle-count identity on a small patch: spectral "
      f"{triangle_count_spectral(small)} == -c3/2 = {-char_poly_coeffs(small)[3] / 2:.0f}")

# Bulk resistance: solve the circuit with opposite window edges held at
# potentials 0 and 1.  Near-isotropic patterns give anisotropy near 1.
rs = resistance_summary(t, inner.window, band=2.0)
print(f"resistance: horizontal {rs.r_horizontal:.3f}, vertical {rs.r_vertical:.3f}, "
      f"anisotropy {rs.anisotropy:.3f}")

# Coverage moments of the unit-disc union: m1 is plain area fraction, m2
# and m3 are 2- and 3-point coverage probabilities on a lag pattern, and
# kappa3 is the third cumulant combining them.
lag_r, lag_s = (2.0, 0.0), (0.0, 2.0)
est = moment_estimates(inner, 1.0, lags=[(1.0, 0.0)], triples=[(lag_r, lag_s)])
print(f"moments: m1 {est.m1:.4f}, m2(1,0) {est.m2[(1.0, 0.0)]:.4f}, "
      f"m3 {est.m3[(lag_r, lag_s)]:.4f}, kappa3 {est.kappa3[(lag_r, lag_s)]:+.5f}")

# Everything above is bundled by feature_vector into the 10 numbers the
# classifiers consume.
fv = feature_vector(inner, hardcore=2.0)
print("\nfeature vector:")
for name, value in zip(fv.__dataclass_fields__, fv.to_array()):
    print(f"  {name:<12} {value:+.4f}")
