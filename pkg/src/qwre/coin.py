"""
Site coins for the walk.

Every site x carries the phase-parametrized coin

    U(ω) = (1/√2) [[e^{iω}, 1], [1, -e^{-iω}]]

which is split into the left-moving part P = [[a, b], [0, 0]] and the
right-moving part Q = [[0, 0], [c, d]]. The companion blocks
R = [[c, d], [0, 0]] and S = [[0, 0], [a, b]] close the product algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidArgumentError

__all__ = [
    "UNITARY_TOL",
    "Coin",
    "ChiralityVector",
    "PHI_STAR",
    "coin_from_phase",
    "split_pq",
    "split_rs",
    "trace_inner",
]

UNITARY_TOL = 1e-12
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class Coin:
    """A 2×2 unitary [[a, b], [c, d]] acting on (|L>, |R>)."""

    a: complex
    b: complex
    c: complex
    d: complex

    @classmethod
    def general(cls, a: complex, b: complex, c: complex, d: complex) -> "Coin":
        """Build an arbitrary unitary coin, validating the unitarity relations.

        Only meant for exercising the product table; the walk itself uses
        :func:`coin_from_phase`.
        """
        coin = cls(complex(a), complex(b), complex(c), complex(d))
        coin.check()
        return coin

    @property
    def matrix(self) -> NDArray[np.complex128]:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.complex128)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def unitarity_error(self) -> float:
        """Largest violation among the unitarity relations."""
        a, b, c, d = self.a, self.b, self.c, self.d
        delta = self.det
        errs = (
            abs(abs(a) ** 2 + abs(c) ** 2 - 1.0),
            abs(abs(b) ** 2 + abs(d) ** 2 - 1.0),
            abs(a * c.conjugate() + b * d.conjugate()),
            abs(abs(delta) - 1.0),
            abs(c + delta * b.conjugate()),
            abs(d - delta * a.conjugate()),
        )
        return max(errs)

    def check(self, tol: float = UNITARY_TOL) -> None:
        err = self.unitarity_error()
        if not err <= tol:
            raise InvalidArgumentError(f"coin is not unitary (error {err:.3e} > {tol:g})")


@dataclass(frozen=True)
class ChiralityVector:
    """Amplitudes on the left/right chirality basis."""

    left: complex
    right: complex

    @property
    def array(self) -> NDArray[np.complex128]:
        return np.array([self.left, self.right], dtype=np.complex128)

    def norm2(self) -> float:
        return abs(self.left) ** 2 + abs(self.right) ** 2


PHI_STAR = ChiralityVector(_INV_SQRT2, 1j * _INV_SQRT2)
"""The symmetric initial qubit (1/√2, i/√2)."""


def coin_from_phase(omega: float) -> Coin:
    """
    Return the site coin for phase ``omega`` (radians).

    Raises
    ------
    InvalidArgumentError
        If omega is not finite.
    """
    omega = float(omega)
    if not math.isfinite(omega):
        raise InvalidArgumentError(f"phase must be finite, got {omega!r}")
    e = complex(math.cos(omega), math.sin(omega))
    return Coin(_INV_SQRT2 * e, _INV_SQRT2, _INV_SQRT2, -_INV_SQRT2 * e.conjugate())


def split_pq(coin: Coin) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """Left-move block P and right-move block Q, with P + Q equal to the coin."""
    z = 0j
    P = np.array([[coin.a, coin.b], [z, z]], dtype=np.complex128)
    Q = np.array([[z, z], [coin.c, coin.d]], dtype=np.complex128)
    return P, Q


def split_rs(coin: Coin) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """The companion blocks R = [[c, d], [0, 0]] and S = [[0, 0], [a, b]]."""
    z = 0j
    R = np.array([[coin.c, coin.d], [z, z]], dtype=np.complex128)
    S = np.array([[z, z], [coin.a, coin.b]], dtype=np.complex128)
    return R, S


def trace_inner(A: NDArray, B: NDArray) -> complex:
    """Trace inner product tr(A* B)."""
    return complex(np.trace(np.conj(A).T @ B))
