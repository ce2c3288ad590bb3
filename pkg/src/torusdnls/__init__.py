"""Pseudospectral toolkit for the periodic derivative Schrodinger equation.

Submodules:
    spectral     band-limited fields, grids, norms, serialization
    gauge        gauge transformation, its inverse, and translations
    functionals  conserved and almost-conserved scalar quantities
    dynamics     right-hand sides, time stepping, trajectory recording
    measure      Gaussian and weighted ensemble sampling, importance weights
    experiments  reproducible numerical studies with persisted results
    cli          command line entry point
"""

__version__ = "0.1.0"

from .spectral import SpectralState, mode_numbers, project  # noqa: F401
