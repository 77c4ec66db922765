"""
Weak-limit densities of X_n / n and convergence diagnostics.

All limit laws here have the form (1 - s x) f_K(x) on (-1/√2, 1/√2), where
f_K(x) = 1 / (π (1 - x²) √(1 - 2x²)) and s is sin(ω_0) (quenched) or the
mean of sin(ω_0) (annealed).

Integrals are taken in the variable t with x = sin(t)/√2, t in (-π/2, π/2):

    f_K(x) dx = √2 / (π (1 + cos² t)) dt

which is smooth and bounded, so the endpoint singularity disappears.
The same substitution gives the antiderivatives used by :meth:`LimitDensity.cdf`:

    ∫ f_K dx   = (1/π) arctan(x / √(1 - 2x²))
    ∫ x f_K dx = -(1/π) arctan(√(1 - 2x²))
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate

from .coin import PHI_STAR, ChiralityVector
from .environment import Environment, PhaseMeasure, measure_mean_sin
from .errors import InvalidArgumentError
from .evolve import Distribution, initial_state, step
from .evolve import distribution as state_distribution

__all__ = [
    "EDGE",
    "HADAMARD_VARIANCE",
    "f_k",
    "LimitDensity",
    "quenched_limit_density",
    "annealed_limit_density",
    "limit_probability",
    "limit_moments",
    "quadrature_moments",
    "limit_characteristic",
    "ks_distance",
    "ConvergenceReport",
    "convergence_report",
]

EDGE = 1.0 / math.sqrt(2.0)
HADAMARD_VARIANCE = (2.0 - math.sqrt(2.0)) / 2.0

_QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-12, limit=200)


def f_k(x: ArrayLike) -> Union[float, NDArray[np.float64]]:
    """The Hadamard-walk limit density; zero off the open interval (-1/√2, 1/√2)."""
    xa = np.asarray(x, dtype=np.float64)
    inside = np.abs(xa) < EDGE
    safe = np.where(inside, xa, 0.0)
    val = np.where(inside, 1.0 / (np.pi * (1.0 - safe ** 2) * np.sqrt(1.0 - 2.0 * safe ** 2)), 0.0)
    return float(val) if val.ndim == 0 else val


@dataclass(frozen=True)
class LimitDensity:
    """Density x -> (1 - mean_sin * x) f_K(x)."""

    mean_sin: float
    support: tuple[float, float] = field(default=(-EDGE, EDGE))

    def __post_init__(self):
        if not -1.0 <= self.mean_sin <= 1.0:
            raise InvalidArgumentError(f"mean_sin must lie in [-1, 1], got {self.mean_sin}")

    def __call__(self, x: ArrayLike):
        xa = np.asarray(x, dtype=np.float64)
        val = (1.0 - self.mean_sin * xa) * f_k(xa)
        return float(val) if np.ndim(val) == 0 else val

    def in_t(self, t: float) -> float:
        """Integrand after x = sin(t)/√2 (includes the Jacobian)."""
        x = math.sin(t) * EDGE
        return (1.0 - self.mean_sin * x) * math.sqrt(2.0) / (math.pi * (1.0 + math.cos(t) ** 2))

    def cdf(self, x: ArrayLike):
        """Closed-form distribution function."""
        xa = np.clip(np.asarray(x, dtype=np.float64), -EDGE, EDGE)
        root = np.sqrt(np.maximum(1.0 - 2.0 * xa ** 2, 0.0))
        # arctan2 keeps the endpoints exact: ±π/2 when root == 0
        base = 0.5 + np.arctan2(xa, root) / np.pi
        val = base + self.mean_sin * np.arctan(root) / np.pi
        val = np.where(xa <= -EDGE, 0.0, np.where(xa >= EDGE, 1.0, val))
        return float(val) if val.ndim == 0 else val


def quenched_limit_density(omega0: float) -> LimitDensity:
    if not math.isfinite(omega0):
        raise InvalidArgumentError(f"omega0 must be finite, got {omega0!r}")
    return LimitDensity(math.sin(omega0))


def annealed_limit_density(measure: PhaseMeasure) -> LimitDensity:
    return LimitDensity(measure_mean_sin(measure))


def _to_t(x: float) -> float:
    if x <= -EDGE:
        return -math.pi / 2
    if x >= EDGE:
        return math.pi / 2
    return math.asin(x * math.sqrt(2.0))


def limit_probability(density: LimitDensity, u: float, v: float) -> float:
    """Mass of [u, v] under ``density`` by adaptive quadrature in t."""
    if u > v:
        raise InvalidArgumentError(f"need u <= v, got ({u}, {v})")
    a, b = _to_t(u), _to_t(v)
    if a >= b:
        return 0.0
    val, _ = integrate.quad(density.in_t, a, b, **_QUAD_OPTS)
    return val


def limit_moments(density: LimitDensity) -> tuple[float, float]:
    """Closed-form mean and variance of the limit law."""
    s = density.mean_sin
    mean = -s * HADAMARD_VARIANCE + 0.0  # no -0.0 for s = 0
    variance = HADAMARD_VARIANCE * (1.0 - HADAMARD_VARIANCE * s * s)
    return mean, variance


def quadrature_moments(density: LimitDensity) -> tuple[float, float, float]:
    """(total mass, mean, variance) computed by quadrature."""
    h = math.pi / 2

    def moment(k: int) -> float:
        return integrate.quad(lambda t: (math.sin(t) * EDGE) ** k * density.in_t(t), -h, h, **_QUAD_OPTS)[0]

    m0, m1, m2 = moment(0), moment(1), moment(2)
    mean = m1 / m0
    return m0, mean, m2 / m0 - mean * mean


def limit_characteristic(density: LimitDensity, xi: float) -> complex:
    """∫ exp(i xi x) density(x) dx."""
    if xi == 0:
        return complex(limit_probability(density, -EDGE, EDGE))
    h = math.pi / 2
    re = integrate.quad(lambda t: math.cos(xi * math.sin(t) * EDGE) * density.in_t(t), -h, h, **_QUAD_OPTS)[0]
    im = integrate.quad(lambda t: math.sin(xi * math.sin(t) * EDGE) * density.in_t(t), -h, h, **_QUAD_OPTS)[0]
    return complex(re, im)


def ks_distance(dist: Distribution, density: LimitDensity) -> float:
    """
    sup_t |F_n(t) - F(t)| between the law of X_n / n and the limit law.

    F is continuous, so the supremum is attained at an atom of the discrete
    law, approached from the left or taken at the atom.
    """
    n = dist.time
    scale = n if n > 0 else 1
    atoms = dist.positions / scale
    right = np.cumsum(dist.mass)
    left = right - dist.mass
    F = density.cdf(atoms)
    return float(max(np.max(np.abs(right - F)), np.max(np.abs(left - F))))


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-n diagnostics of X_n / n against the limit law."""

    n_values: list[int]
    ks_distances: list[float]
    empirical_means: list[float]
    empirical_variances: list[float]
    limit_mean: float
    limit_variance: float

    def ks_decreasing(self) -> bool:
        d = self.ks_distances
        return all(b < a for a, b in zip(d, d[1:]))

    def rows(self):
        return list(zip(self.n_values, self.ks_distances, self.empirical_means, self.empirical_variances))


def convergence_report(
    env_or_omega0: Union[Environment, float],
    n_values: Sequence[int],
    qubit: ChiralityVector = PHI_STAR,
    density: Optional[LimitDensity] = None,
) -> ConvergenceReport:
    """
    Evolve once up to max(n_values), recording diagnostics at each requested n.

    A bare phase means the constant environment ω ≡ omega0. The comparison law
    defaults to the quenched limit for the environment's origin phase, which is
    the right target for the symmetric initial qubit.
    """
    n_values = [int(n) for n in n_values]
    if not n_values:
        raise InvalidArgumentError("n_values must not be empty")
    if any(n <= 0 for n in n_values) or any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise InvalidArgumentError(f"n_values must be positive and strictly ascending, got {n_values}")
    env = env_or_omega0 if isinstance(env_or_omega0, Environment) else Environment.constant(float(env_or_omega0))
    if density is None:
        density = quenched_limit_density(env.phase(0))

    wanted = set(n_values)
    ks, means, variances = [], [], []
    state = initial_state(qubit)
    for t in range(1, n_values[-1] + 1):
        state = step(state, env)
        if t in wanted:
            dist = state_distribution(state)
            ks.append(ks_distance(dist, density))
            means.append(dist.mean() / t)
            variances.append(dist.variance() / t ** 2)
    mean, var = limit_moments(density)
    return ConvergenceReport(n_values, ks, means, variances, mean, var)
