"""Numerical gradient flow of half the norm-square of the moment map."""

from .basins import BasinReport, basin_classify
from .fits import GammaFit, RateFit, lojasiewicz_fit, radial_gamma_samples, rate_classify
from .integrate import IntegratorConfig, Trajectory, integrate
from .models import (
    FlowSystem,
    build_local_model,
    p1_chordal,
    p1_moment,
    p1_system,
    radial_power_system,
)

__all__ = [
    "BasinReport", "basin_classify", "GammaFit", "RateFit", "lojasiewicz_fit",
    "radial_gamma_samples", "rate_classify", "IntegratorConfig", "Trajectory",
    "integrate", "FlowSystem", "build_local_model", "p1_chordal", "p1_moment",
    "p1_system", "radial_power_system",
]
