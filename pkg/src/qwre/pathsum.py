"""
Brute-force path-sum oracle.

Ξ_n(l, m) is the sum, over every ordering of l left and m right steps, of the
ordered product of P/Q blocks taken at the sites where each step starts.
The first step (at the origin) is the rightmost factor.

Each word is reduced with the closed multiplication table of the blocks
P, Q, R, S (e.g. P_x Q_y = b_x R_y), so any path product collapses to
a scalar times one of P_0, Q_0, R_0, S_0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from numpy.typing import NDArray

from .coin import PHI_STAR, ChiralityVector, Coin, coin_from_phase, split_pq, split_rs
from .environment import Environment
from .errors import InvalidArgumentError, ResourceLimitError
from .evolve import Distribution

__all__ = [
    "LEFT",
    "RIGHT",
    "DEFAULT_CAP",
    "PRODUCT_TABLE",
    "PathWord",
    "PqrsCoefficients",
    "enumerate_paths",
    "path_matrix",
    "reduce_word",
    "xi_matrix",
    "xi_coefficients",
    "oracle_distribution",
    "oracle_coefficients",
    "distribution_from_coefficients",
    "basis_matrices",
]

LEFT = "L"
RIGHT = "R"
DEFAULT_CAP = 16

# PRODUCT_TABLE[(X, Y)] = (coin entry of the left factor, resulting block):
# X_x Y_y = entry_x * Z_y.
PRODUCT_TABLE: dict[tuple[str, str], tuple[str, str]] = {
    ("P", "P"): ("a", "P"), ("P", "Q"): ("b", "R"), ("P", "R"): ("a", "R"), ("P", "S"): ("b", "P"),
    ("Q", "P"): ("c", "S"), ("Q", "Q"): ("d", "Q"), ("Q", "R"): ("c", "Q"), ("Q", "S"): ("d", "S"),
    ("R", "P"): ("c", "P"), ("R", "Q"): ("d", "R"), ("R", "R"): ("c", "R"), ("R", "S"): ("d", "P"),
    ("S", "P"): ("a", "S"), ("S", "Q"): ("b", "Q"), ("S", "R"): ("a", "Q"), ("S", "S"): ("b", "S"),
}

BASIS = ("P", "Q", "R", "S")


@dataclass(frozen=True)
class PathWord:
    """A sequence of moves; ``moves[0]`` is the first step, taken at the origin."""

    moves: tuple[str, ...]

    def __post_init__(self):
        if any(mv not in (LEFT, RIGHT) for mv in self.moves):
            raise InvalidArgumentError(f"moves must be 'L' or 'R', got {self.moves!r}")

    @classmethod
    def parse(cls, text: str) -> "PathWord":
        return cls(tuple(text))

    def sites(self) -> list[int]:
        """x_0 = 0, x_1, ..., x_n: the walker's site before each step and after the last."""
        out = [0]
        for mv in self.moves:
            out.append(out[-1] + (-1 if mv == LEFT else 1))
        return out

    def factors(self) -> list[tuple[str, int]]:
        """(block, site) pairs in matrix order, leftmost factor first."""
        sites = self.sites()
        return [("P" if mv == LEFT else "Q", sites[j]) for j, mv in enumerate(self.moves)][::-1]

    def __len__(self) -> int:
        return len(self.moves)


@dataclass(frozen=True)
class PqrsCoefficients:
    """Coordinates of a 2×2 matrix in the basis P_0, Q_0, R_0, S_0."""

    p: complex
    q: complex
    r: complex
    s: complex

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (self.p, self.q, self.r, self.s)

    def matrix(self, coin0: Coin) -> NDArray[np.complex128]:
        P, Q, R, S = basis_matrices(coin0)
        return self.p * P + self.q * Q + self.r * R + self.s * S

    def max_abs_diff(self, other: "PqrsCoefficients") -> float:
        return max(abs(u - v) for u, v in zip(self.as_tuple(), other.as_tuple()))


def basis_matrices(coin: Coin) -> tuple[NDArray, NDArray, NDArray, NDArray]:
    return (*split_pq(coin), *split_rs(coin))


def _check_nm(l: int, m: int) -> None:
    if l < 0 or m < 0:
        raise InvalidArgumentError(f"step counts must be nonnegative, got ({l}, {m})")
    if l + m == 0:
        raise InvalidArgumentError("empty walk: Ξ_0 is not defined (time 0 is the initial state)")


def enumerate_paths(l: int, m: int) -> Iterator[PathWord]:
    """All C(l+m, l) words with ``l`` left and ``m`` right steps."""
    _check_nm(l, m)
    n = l + m
    for left_slots in itertools.combinations(range(n), l):
        moves = [RIGHT] * n
        for j in left_slots:
            moves[j] = LEFT
        yield PathWord(tuple(moves))


def path_matrix(word: PathWord, env: Environment) -> NDArray[np.complex128]:
    """Explicit ordered product of the P/Q blocks along ``word``."""
    out = np.eye(2, dtype=np.complex128)
    sites = word.sites()
    for j, mv in enumerate(word.moves):
        P, Q = split_pq(coin_from_phase(env.phase(sites[j])))
        out = (P if mv == LEFT else Q) @ out
    return out


class _Entries:
    """Lazy per-site lookup of coin entries a, b, c, d for one environment."""

    _INDEX = {"a": 0, "b": 1, "c": 2, "d": 3}

    def __init__(self, env: Environment):
        self.env = env
        self.cache: dict[int, tuple[complex, complex, complex, complex]] = {}

    def get(self, name: str, x: int) -> complex:
        row = self.cache.get(x)
        if row is None:
            c = coin_from_phase(self.env.phase(x))
            row = self.cache[x] = (c.a, c.b, c.c, c.d)
        return row[self._INDEX[name]]


def _reduce(word: PathWord, entries: _Entries) -> tuple[complex, str]:
    factors = word.factors()
    block, site = factors[0]
    scalar = 1 + 0j
    for nxt, nxt_site in factors[1:]:
        name, block = PRODUCT_TABLE[(block, nxt)]
        scalar *= entries.get(name, site)
        site = nxt_site
    return scalar, block


def reduce_word(word: PathWord, env: Environment) -> tuple[complex, str]:
    """
    Collapse ``word`` to ``scalar * B_0`` with B in {P, Q, R, S}.

    The running product ``scalar * B_y`` is multiplied on the right by the next
    factor; the table gives the new block and the coin entry of site y that
    joins the scalar.
    """
    if not word.moves:
        raise InvalidArgumentError("cannot reduce an empty word")
    return _reduce(word, _Entries(env))


def xi_matrix(l: int, m: int, env: Environment, cap: int = DEFAULT_CAP) -> NDArray[np.complex128]:
    """Ξ_{l+m}(l, m) summed directly from explicit path products."""
    _check_cap(l + m, cap)
    total = np.zeros((2, 2), dtype=np.complex128)
    for word in enumerate_paths(l, m):
        total += path_matrix(word, env)
    return total


def xi_coefficients(l: int, m: int, env: Environment, cap: int = DEFAULT_CAP) -> PqrsCoefficients:
    """PQRS coefficients of Ξ_{l+m}(l, m), accumulated from reduced words."""
    _check_nm(l, m)
    _check_cap(l + m, cap)
    acc = dict.fromkeys(BASIS, 0j)
    entries = _Entries(env)
    for word in enumerate_paths(l, m):
        scalar, block = _reduce(word, entries)
        acc[block] += scalar
    return PqrsCoefficients(acc["P"], acc["Q"], acc["R"], acc["S"])


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise ResourceLimitError(f"path enumeration for n = {n} exceeds cap {cap} (2^n paths)")


def oracle_coefficients(env: Environment, n: int, cap: int = DEFAULT_CAP) -> list[PqrsCoefficients]:
    """Coefficients of Ξ_n(n-m, m) for m = 0..n (position index order)."""
    _check_cap(n, cap)
    return [xi_coefficients(n - m, m, env, cap) for m in range(n + 1)]


def distribution_from_coefficients(
    coeffs: Sequence[PqrsCoefficients],
    env: Environment,
    qubit: ChiralityVector = PHI_STAR,
) -> Distribution:
    """Law of X_n given the coefficients of every Ξ_n(l, m), ordered by m."""
    coin0 = coin_from_phase(env.phase(0))
    phi = qubit.array
    mass = np.array([np.sum(np.abs(c.matrix(coin0) @ phi) ** 2) for c in coeffs])
    return Distribution(len(coeffs) - 1, mass)


def oracle_distribution(
    env: Environment,
    n: int,
    qubit: ChiralityVector = PHI_STAR,
    cap: int = DEFAULT_CAP,
) -> Distribution:
    """Law of X_n from ||Ξ_n(l, m) qubit||^2 over l + m = n."""
    if n < 0:
        raise InvalidArgumentError(f"n must be nonnegative, got {n}")
    _check_cap(n, cap)
    if n == 0:
        return Distribution(0, np.array([qubit.norm2()]))
    return distribution_from_coefficients(oracle_coefficients(env, n, cap), env, qubit)


def random_word(rng: np.random.Generator, length: int) -> PathWord:
    return PathWord(tuple(rng.choice([LEFT, RIGHT], size=length)))


def words_of_length(n: int) -> Sequence[PathWord]:
    return [PathWord(w) for w in itertools.product((LEFT, RIGHT), repeat=n)]
