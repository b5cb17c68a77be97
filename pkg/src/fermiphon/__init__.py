"""Exact-solution engine for the one-dimensional fermion-phonon model."""

from .params import (DerivedCouplings, ModelParams, MomentumGrid,
                     derived_couplings, momentum_grid, validate_params)

__version__ = "0.1.0"

__all__ = [
    "ModelParams", "DerivedCouplings", "MomentumGrid", "validate_params",
    "derived_couplings", "momentum_grid", "__version__",
]
