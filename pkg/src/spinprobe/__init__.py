"""Smeared spin-magnetic and Unruh-DeWitt detector models of a hydrogen-like electron."""

from .atom import ALPHA_CODATA, OrbitalParams, OrbitalProfile, energy_level, make_orbital
from .detector import (
    CouplingModel,
    GaussianSwitching,
    ModelKind,
    QubitState,
    ResponseSet,
    SampledSwitching,
    WindowSwitching,
    adiabatic_rate_closed,
    adiabatic_rate_numeric,
    evolve_leading_order,
    flip_probability,
    response_K,
    response_L,
    response_M,
    response_set,
)
from .numerics import DEFAULT_TOL, Tolerance

__version__ = "0.1.0"
