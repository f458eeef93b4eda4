"""Discrete modulation spaces, trace maps and pseudo-differential operators on periodic grids."""
from .lattice import GridSpec, OperatorMatrix, SampledField, dual_grid, product_grid
from .gabor import GaborSystem, Window, gaussian_window, modulation_norm, stft
from .mixed_norm import MixedNormSpec, mixed_quasi_norm

__all__ = [
    "GridSpec", "OperatorMatrix", "SampledField", "dual_grid", "product_grid",
    "GaborSystem", "Window", "gaussian_window", "modulation_norm", "stft",
    "MixedNormSpec", "mixed_quasi_norm",
]
