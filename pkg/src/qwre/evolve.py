"""
Exact state-vector evolution.

A state at time n only has support on x = -n, -n+2, ..., n, so it is stored
as two arrays of length n+1 (left and right chirality) indexed by
k = (x + n) / 2. One step maps old index k (site y = -n + 2k) to new index k
through the left-move block P_y and to new index k+1 through Q_y:

    left'[k]    = a_y L[k] + b_y R[k]
    right'[k+1] = c_y L[k] + d_y R[k]

which is ψ_{n+1}(x) = P_{x+1} ψ_n(x+1) + Q_{x-1} ψ_n(x-1).
Everything also works with leading batch axes (many environments at once).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np
from numpy.typing import NDArray

from .coin import PHI_STAR, UNITARY_TOL, ChiralityVector
from .environment import Environment, EnvironmentSpec, PhaseMeasure, sample_environments
from .errors import InvalidArgumentError

__all__ = [
    "WalkState",
    "Distribution",
    "initial_state",
    "step",
    "distribution",
    "evolve_state",
    "evolve_to",
    "evolve_batch",
    "characteristic_function",
    "annealed_exact",
    "annealed_monte_carlo",
    "AnnealedEstimate",
]

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _positions(n: int) -> NDArray[np.int64]:
    return np.arange(-n, n + 1, 2, dtype=np.int64)


@dataclass(frozen=True)
class WalkState:
    """
    Amplitudes at time ``time`` on the reachable sites -n, -n+2, ..., n.

    ``amplitudes`` has shape (2, n+1): row 0 is the left chirality, row 1 the right.
    """

    time: int
    amplitudes: NDArray[np.complex128]

    @property
    def positions(self) -> NDArray[np.int64]:
        return _positions(self.time)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def amplitude_at(self, x: int) -> ChiralityVector:
        n = self.time
        if abs(x) > n or (x + n) % 2:
            return ChiralityVector(0j, 0j)
        k = (x + n) // 2
        return ChiralityVector(complex(self.amplitudes[0, k]), complex(self.amplitudes[1, k]))

    def dense(self) -> NDArray[np.complex128]:
        """Shape (2, 2n+1) array over sites -n..n, off-parity columns zero."""
        out = np.zeros((2, 2 * self.time + 1), dtype=np.complex128)
        out[:, ::2] = self.amplitudes
        return out


@dataclass(frozen=True)
class Distribution:
    """Position law at time ``time``; ``mass[k]`` is the probability of ``positions[k]``."""

    time: int
    mass: NDArray[np.float64]

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=np.float64)
        if mass.shape != (self.time + 1,):
            raise InvalidArgumentError(f"time-{self.time} distribution needs {self.time + 1} masses, got shape {mass.shape}")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)

    @classmethod
    def from_mapping(cls, time: int, mass: Mapping[int, float]) -> "Distribution":
        arr = np.zeros(time + 1)
        for x, p in mass.items():
            if abs(x) > time or (x + time) % 2:
                if p != 0:
                    raise InvalidArgumentError(f"position {x} is unreachable at time {time}")
                continue
            arr[(x + time) // 2] = p
        return cls(time, arr)

    @property
    def positions(self) -> NDArray[np.int64]:
        return _positions(self.time)

    def prob(self, x: int) -> float:
        n = self.time
        if abs(x) > n or (x + n) % 2:
            return 0.0
        return float(self.mass[(x + n) // 2])

    def as_dict(self) -> dict[int, float]:
        return {int(x): float(p) for x, p in zip(self.positions, self.mass)}

    def total(self) -> float:
        return math.fsum(self.mass)

    def check(self, tol: float = 1e-10) -> None:
        if np.any(self.mass < 0):
            raise InvalidArgumentError("negative probability mass")
        if abs(self.total() - 1.0) > tol:
            raise InvalidArgumentError(f"total mass {self.total()!r} differs from 1 by more than {tol:g}")

    def mean(self) -> float:
        return float(np.dot(self.positions, self.mass))

    def variance(self) -> float:
        x = self.positions.astype(np.float64)
        mu = np.dot(x, self.mass)
        return float(np.dot((x - mu) ** 2, self.mass))


def initial_state(qubit: ChiralityVector = PHI_STAR) -> WalkState:
    """Time-0 state: the whole qubit at the origin."""
    if abs(qubit.norm2() - 1.0) > UNITARY_TOL:
        raise InvalidArgumentError(f"initial qubit is not normalized (|.|^2 = {qubit.norm2()!r})")
    return WalkState(0, qubit.array.reshape(2, 1))


def _step_arrays(amps: NDArray, phases: NDArray) -> NDArray:
    """One step on (..., 2, n+1) amplitudes given (..., n+1) coin phases at the occupied sites."""
    e = np.exp(1j * phases)
    a = _INV_SQRT2 * e
    d = -_INV_SQRT2 * np.conj(e)
    L, R = amps[..., 0, :], amps[..., 1, :]
    shape = amps.shape[:-1] + (amps.shape[-1] + 1,)
    out = np.zeros(shape, dtype=np.complex128)
    out[..., 0, :-1] = a * L + _INV_SQRT2 * R
    out[..., 1, 1:] = _INV_SQRT2 * L + d * R
    return out


def step(state: WalkState, env: Environment) -> WalkState:
    """Advance one time step in ``env``. No renormalization is applied."""
    phases = env.phase_array(state.positions)
    return WalkState(state.time + 1, _step_arrays(state.amplitudes, phases))


def distribution(state: WalkState) -> Distribution:
    return Distribution(state.time, np.sum(np.abs(state.amplitudes) ** 2, axis=0))


def evolve_state(qubit: ChiralityVector, env: Environment, n: int) -> WalkState:
    if n < 0:
        raise InvalidArgumentError(f"number of steps must be nonnegative, got {n}")
    state = initial_state(qubit)
    for _ in range(n):
        state = step(state, env)
    return state


def evolve_to(qubit: ChiralityVector, env: Environment, n: int) -> Distribution:
    """Distribution of X_n in ``env`` starting from ``qubit`` at the origin."""
    return distribution(evolve_state(qubit, env, n))


def evolve_batch(qubit: ChiralityVector, windows: NDArray[np.float64], n: int) -> NDArray[np.float64]:
    """
    Evolve many environments in lockstep.

    Parameters
    ----------
    windows:
        Array (B, 2*extent + 1) of phases at sites -extent..extent, extent >= n.

    Returns
    -------
    Array (B, n+1) of probabilities at positions -n, -n+2, ..., n.
    """
    windows = np.atleast_2d(np.asarray(windows, dtype=np.float64))
    extent = (windows.shape[1] - 1) // 2
    if windows.shape[1] != 2 * extent + 1 or extent < n - 1:
        raise InvalidArgumentError(f"phase windows of width {windows.shape[1]} do not cover {n} steps")
    state = initial_state(qubit)
    amps = np.broadcast_to(state.amplitudes, (windows.shape[0], 2, 1)).copy()
    for t in range(n):
        cols = extent + _positions(t)
        amps = _step_arrays(amps, windows[:, cols])
    return np.sum(np.abs(amps) ** 2, axis=-2)


def characteristic_function(dist: Distribution, xi: float) -> complex:
    """E[exp(i xi X_n / n)]; the n = 0 law is a point mass at 0."""
    if dist.time == 0:
        return complex(dist.mass[0])
    x = dist.positions / dist.time
    return complex(np.sum(dist.mass * np.exp(1j * xi * x)))


# -- annealed laws ------------------------------------------------------------

def annealed_exact(
    measure0: PhaseMeasure,
    n: int,
    qubit: ChiralityVector = PHI_STAR,
    background: Optional[Environment] = None,
) -> Distribution:
    """
    Annealed law of X_n when the origin phase has law ``measure0``.

    The finite-n law depends on the environment only through sin(ω_0), and
    linearly, so the average over any measure is the quenched law at the
    mean of sin(ω_0). Atomic measures are averaged atom by atom; uniform
    measures use that linearity with the two reference phases 0 and π/2.
    The ``background`` supplies every other site (phase 0 by default).
    """
    bg = background if background is not None else Environment()
    atoms = measure0.atoms()
    if atoms is not None:
        acc = np.zeros(n + 1)
        for value, weight in atoms:
            acc += weight * evolve_to(qubit, bg.with_phase(0, value), n).mass
        return Distribution(n, acc)
    p0 = evolve_to(qubit, bg.with_phase(0, 0.0), n).mass
    p1 = evolve_to(qubit, bg.with_phase(0, math.pi / 2), n).mass
    return Distribution(n, p0 + measure0.mean_sin() * (p1 - p0))


@dataclass(frozen=True)
class AnnealedEstimate:
    """Monte Carlo estimate: sample mean and its standard error per position."""

    mean: Distribution
    stderr: NDArray[np.float64]
    n_samples: int


def annealed_monte_carlo(
    spec: EnvironmentSpec,
    n: int,
    n_samples: int,
    seed: int,
    qubit: ChiralityVector = PHI_STAR,
    chunk: int = 20000,
) -> AnnealedEstimate:
    """Average the quenched law of X_n over ``n_samples`` sampled environments."""
    if n < 0:
        raise InvalidArgumentError(f"number of steps must be nonnegative, got {n}")
    windows = sample_environments(spec, max(n, 0), n_samples, seed)
    total = np.zeros(n + 1)
    total_sq = np.zeros(n + 1)
    for start in range(0, n_samples, chunk):
        probs = evolve_batch(qubit, windows[start:start + chunk], n)
        total += probs.sum(axis=0)
        total_sq += (probs ** 2).sum(axis=0)
    mean = total / n_samples
    if n_samples > 1:
        var = np.maximum(total_sq / n_samples - mean ** 2, 0.0) * n_samples / (n_samples - 1)
    else:
        var = np.zeros_like(mean)
    return AnnealedEstimate(Distribution(n, mean), np.sqrt(var / n_samples), n_samples)
