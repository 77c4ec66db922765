"""Discrete-time quantum walks on one-dimensional random environments."""

from .coin import PHI_STAR, ChiralityVector, Coin, coin_from_phase, split_pq, split_rs
from .environment import Environment, EnvironmentSpec, PhaseMeasure, sample_environment
from .evolve import Distribution, WalkState, evolve_to
from .limit import LimitDensity, f_k, quenched_limit_density, annealed_limit_density

__version__ = "0.1.0"

__all__ = [
    "PHI_STAR",
    "ChiralityVector",
    "Coin",
    "coin_from_phase",
    "split_pq",
    "split_rs",
    "Environment",
    "EnvironmentSpec",
    "PhaseMeasure",
    "sample_environment",
    "Distribution",
    "WalkState",
    "evolve_to",
    "LimitDensity",
    "f_k",
    "quenched_limit_density",
    "annealed_limit_density",
]
