"""Summarize-and-classify toolkit for regular spatial point processes.

The package simulates labelled realizations of hard-core point processes
(Strauss hard-core, simple sequential inhibition, dead leaves,
Diggle-Gratton), reduces each realization to a fixed vector of summary
statistics (nearest-neighbour regression coefficients, Delaunay
triangulation extremes, adjacency spectra), and trains classifiers on the
labelled vectors.  Misclassification rates with exact binomial confidence
intervals quantify how distinguishable two processes are.
"""

from .errors import CalibrationError, ConfigError, NumericalError
from .geometry import Realization, Window, clip, erode_window, nn_distances, observe
from .rng import mix_seed, rng_from

__all__ = [
    "CalibrationError",
    "ConfigError",
    "NumericalError",
    "Realization",
    "Window",
    "clip",
    "erode_window",
    "mix_seed",
    "nn_distances",
    "observe",
    "rng_from",
]

__version__ = "0.1.0"
