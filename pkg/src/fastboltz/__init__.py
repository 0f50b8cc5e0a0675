"""Spectral solvers for the Boltzmann equation with a DSMC baseline."""

from .grid import (VelocityGrid, SpectralField, TruncationParams, build_grid,
                   forward_transform, inverse_transform, dealias_params,
                   support_radius_for_box)
from .kernels import VHSKernel
from .classical import (ClassicalModesTable, compute_classical_modes,
                        apply_classical)
from .fast import (AngleSet, FastKernelTables, phi2, phi3, psi3,
                   build_fast_decomposition, apply_fast, apply_fast_hat)

__version__ = "0.1.0"

__all__ = [
    "VelocityGrid", "SpectralField", "TruncationParams", "build_grid",
    "forward_transform", "inverse_transform", "dealias_params",
    "support_radius_for_box",
    "VHSKernel",
    "ClassicalModesTable", "compute_classical_modes", "apply_classical",
    "AngleSet", "FastKernelTables", "phi2", "phi3", "psi3",
    "build_fast_decomposition", "apply_fast", "apply_fast_hat",
    "__version__",
]
