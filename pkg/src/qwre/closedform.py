"""
Closed forms for the path-sum coefficients.

For n = l + m the coefficients factor as (Hadamard amplitude) × (phase factor):
the amplitudes are alternating binomial sums that do not depend on the
environment, and the phase factors are exponentials of partial sums of site
phases. The same amplitudes also have Jacobi-polynomial forms evaluated at 0.

The binomial sums are accumulated in exact integer arithmetic and scaled by
(1/√2)^{n-1} at the end, so cancellation cannot eat the result.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

import numpy as np

from .environment import Environment
from .errors import InternalConsistencyError, InvalidArgumentError, ResourceLimitError
from .evolve import Distribution
from .pathsum import PqrsCoefficients

__all__ = [
    "DEFAULT_PRECISION_CAP",
    "HadamardAmplitudes",
    "PhaseFactors",
    "hadamard_amplitudes",
    "phase_factors",
    "xi_coefficients_closed",
    "jacobi_p",
    "amplitudes_via_jacobi",
    "reciprocal_binomial_sum",
    "binomial_sum",
    "quenched_distribution_prop2",
    "w2_value",
    "w2_vanishes_check",
]

DEFAULT_PRECISION_CAP = 64
_INV_SQRT2 = 1.0 / math.sqrt(2.0)

Number = Union[int, float, Fraction]


@dataclass(frozen=True)
class HadamardAmplitudes:
    p_h: float
    q_h: float
    r_h: float
    s_h: float


@dataclass(frozen=True)
class PhaseFactors:
    theta_p: complex
    theta_q: complex
    theta_r: complex
    theta_s: complex


def _check_lm(l: int, m: int) -> None:
    if l < 0 or m < 0:
        raise InvalidArgumentError(f"step counts must be nonnegative, got ({l}, {m})")
    if l + m == 0:
        raise InvalidArgumentError("l + m must be at least 1")


def _signed_sum(terms) -> int:
    return sum(terms, 0)


def hadamard_integer_sums(l: int, m: int) -> tuple[int, int, int]:
    """The integer binomial sums behind p, q and r (= s), before the (1/√2)^{n-1} scale."""
    comb = math.comb
    p = _signed_sum((-1) ** (m - g) * comb(l - 1, g) * comb(m - 1, g - 1) for g in range(1, min(l - 1, m) + 1))
    q = _signed_sum((-1) ** (m - g - 1) * comb(l - 1, g - 1) * comb(m - 1, g) for g in range(1, min(l, m - 1) + 1))
    r = _signed_sum((-1) ** (m - g) * comb(l - 1, g - 1) * comb(m - 1, g - 1) for g in range(1, min(l, m) + 1))
    return p, q, r


def hadamard_amplitudes(l: int, m: int, cap: int = DEFAULT_PRECISION_CAP) -> HadamardAmplitudes:
    """
    Environment-free amplitudes p^(H), q^(H), r^(H) = s^(H) for n = l + m.

    Raises
    ------
    ResourceLimitError
        If l + m exceeds ``cap``.
    """
    _check_lm(l, m)
    n = l + m
    if n > cap:
        raise ResourceLimitError(f"n = {n} exceeds the closed-form cap {cap}")
    scale = _INV_SQRT2 ** (n - 1)
    if m == 0:
        return HadamardAmplitudes(scale, 0.0, 0.0, 0.0)
    if l == 0:
        return HadamardAmplitudes(0.0, (-1) ** (n - 1) * scale, 0.0, 0.0)
    p, q, r = hadamard_integer_sums(l, m)
    return HadamardAmplitudes(p * scale, q * scale, r * scale, r * scale)


def _phase_sum(env: Environment, sites) -> float:
    return math.fsum(env.phase(x) for x in sites)


def _left_run(env: Environment, start: int, stop: int) -> complex:
    """exp(+i(ω_{-start} + ... + ω_{-stop})); empty when stop < start."""
    return cmath.exp(1j * _phase_sum(env, (-k for k in range(start, stop + 1))))


def _right_run(env: Environment, start: int, stop: int) -> complex:
    """exp(-i(ω_start + ... + ω_stop)); empty when stop < start."""
    return cmath.exp(-1j * _phase_sum(env, range(start, stop + 1)))


def phase_factors(l: int, m: int, env: Environment, printed_boundary: bool = False) -> PhaseFactors:
    """
    Unit-modulus phase factors Θ^(p), Θ^(q), Θ^(r), Θ^(s) at (l, m).

    At the all-left boundary (n, 0), the p factor is exp(+i(ω_{-1}+...+ω_{-(n-1)})),
    which is what the path sum produces. ``printed_boundary=True`` returns the
    conjugate exp(-i(...)) instead, reproducing the published boundary clause
    (kept only to demonstrate the mismatch).
    """
    _check_lm(l, m)
    n = l + m
    if l == 0:
        return PhaseFactors(1, _right_run(env, 1, n - 1), 1, 1)
    if m == 0:
        tp = _left_run(env, 1, n - 1)
        return PhaseFactors(tp.conjugate() if printed_boundary else tp, 1, 1, 1)

    if l - 1 > m:
        tp = _left_run(env, 1, l - m - 1)
    elif l - 1 == m:
        tp = 1 + 0j
    else:
        tp = _right_run(env, 0, m - l)

    if l > m - 1:
        tq = _left_run(env, 0, l - m)
    elif l == m - 1:
        tq = 1 + 0j
    else:
        tq = _right_run(env, 1, m - l - 1)

    if l > m:
        tr = _left_run(env, 0, l - m - 1)
        ts = _left_run(env, 1, l - m)
    elif l == m:
        tr = ts = 1 + 0j
    else:
        tr = _right_run(env, 1, m - l)
        ts = _right_run(env, 0, m - l - 1)
    return PhaseFactors(tp, tq, tr, ts)


def xi_coefficients_closed(l: int, m: int, env: Environment, cap: int = DEFAULT_PRECISION_CAP) -> PqrsCoefficients:
    """Phase factor times Hadamard amplitude, componentwise."""
    h = hadamard_amplitudes(l, m, cap)
    t = phase_factors(l, m, env)
    return PqrsCoefficients(t.theta_p * h.p_h, t.theta_q * h.q_h, t.theta_r * h.r_h, t.theta_s * h.s_h)


# -- Jacobi forms -------------------------------------------------------------

def _is_exact(v) -> bool:
    return isinstance(v, Rational)


def jacobi_p(n: int, nu: Number, mu: Number, x: Number) -> Number:
    """
    Jacobi polynomial P_n^{(nu, mu)}(x) from its terminating hypergeometric series

        Γ(n+nu+1) / (Γ(n+1) Γ(nu+1)) · 2F1(-n, n+nu+mu+1; nu+1; (1-x)/2).

    The gamma ratio is the product of (nu+k)/k for k = 1..n. With integer or
    Fraction arguments the evaluation is exact and a Fraction is returned;
    otherwise the standard three-term recurrence is used, since the alternating
    series loses digits to cancellation in floating point.
    """
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise InvalidArgumentError(f"degree must be a nonnegative integer, got {n!r}")
    if nu <= -1 or mu <= -1:
        raise InvalidArgumentError(f"Jacobi parameters must exceed -1, got nu={nu}, mu={mu}")
    n = int(n)
    exact = _is_exact(nu) and _is_exact(mu) and _is_exact(x)
    if exact:
        nu, mu, x = Fraction(nu), Fraction(mu), Fraction(x)
    else:
        return _jacobi_recurrence(n, float(nu), float(mu), float(x))
    one = Fraction(1)
    z = (one - x) / 2
    prefactor = one
    for k in range(1, n + 1):
        prefactor *= (nu + k) / k
    b = n + nu + mu + 1
    term = one
    total = one
    for j in range(n):
        # ratio of consecutive 2F1 terms: (a+j)(b+j) z / ((c+j)(j+1)), a = -n, c = nu + 1
        term = term * (-n + j) * (b + j) * z / ((nu + 1 + j) * (j + 1))
        total += term
    return prefactor * total


def _jacobi_recurrence(n: int, a: float, b: float, x: float) -> float:
    prev, cur = 1.0, (a + 1) + (a + b + 2) * (x - 1) / 2
    if n == 0:
        return prev
    for k in range(2, n + 1):
        s = 2 * k + a + b
        c1 = 2 * k * (k + a + b) * (s - 2)
        c2 = (s - 1) * (s * (s - 2) * x + a * a - b * b)
        c3 = 2 * (k + a - 1) * (k + b - 1) * s
        prev, cur = cur, (c2 * cur - c3 * prev) / c1
    return cur


def reciprocal_binomial_sum(k: int, n: int) -> Fraction:
    """Σ_{γ=1}^{k} (-1)^{γ-1} (1/γ) C(k-1, γ-1) C(n-k-1, γ-1), exactly."""
    return sum(
        (Fraction((-1) ** (g - 1) * math.comb(k - 1, g - 1) * math.comb(n - k - 1, g - 1), g) for g in range(1, k + 1)),
        Fraction(0),
    )


def binomial_sum(k: int, n: int) -> int:
    """Σ_{γ=1}^{k} (-1)^{γ-1} C(k-1, γ-1) C(n-k-1, γ-1), exactly."""
    return sum((-1) ** (g - 1) * math.comb(k - 1, g - 1) * math.comb(n - k - 1, g - 1) for g in range(1, k + 1))


def amplitudes_via_jacobi(l: int, n: int) -> tuple[float, float]:
    """
    p^(H)_n(l, n-l) and q^(H)_n(l, n-l) from Jacobi polynomials at 0, for 1 <= l <= n/2:

        p = (1/√2)^{n-2l+1} (-1)^{n-l} {P^{0,n-2l}_{l-1}(0) - P^{1,n-2l}_{l-1}(0)}
        q = (1/√2)^{n-2l+1} (-1)^{n-l} {((n-l)/l) P^{1,n-2l}_{l-1}(0) - P^{0,n-2l}_{l-1}(0)}
    """
    if not 1 <= l <= n // 2:
        raise InvalidArgumentError(f"need 1 <= l <= n/2, got l={l}, n={n}")
    P0 = jacobi_p(l - 1, 0, n - 2 * l, 0)
    P1 = jacobi_p(l - 1, 1, n - 2 * l, 0)
    sign = -1 if (n - l) % 2 else 1
    scale = _INV_SQRT2 ** (n - 2 * l + 1)
    p = sign * (P0 - P1)
    q = sign * (Fraction(n - l, l) * P1 - P0)
    return float(p) * scale, float(q) * scale


# -- quenched law from the Hadamard law ----------------------------------------

def quenched_distribution_prop2(
    n: int,
    omega0: float,
    hadamard_dist: Distribution,
    cap: int = DEFAULT_PRECISION_CAP,
    tol: float = 1e-10,
) -> Distribution:
    """
    Quenched law from the ω ≡ 0 law:

        P^ω_n(x) = P^0_n(x) + ½ (p^(H)² − q^(H)²) sin ω_0.

    Raises
    ------
    InternalConsistencyError
        If any corrected mass falls below -tol.
    """
    if n < 1:
        raise InvalidArgumentError(f"n must be positive, got {n}")
    if hadamard_dist.time != n:
        raise InvalidArgumentError(f"Hadamard law is at time {hadamard_dist.time}, expected {n}")
    s = math.sin(omega0)
    mass = np.array(hadamard_dist.mass, dtype=np.float64)
    for m in range(n + 1):
        h = hadamard_amplitudes(n - m, m, cap)
        mass[m] += 0.5 * (h.p_h ** 2 - h.q_h ** 2) * s
    if np.any(mass < -tol):
        k = int(np.argmin(mass))
        raise InternalConsistencyError(f"corrected mass {mass[k]:.3e} at x = {2 * k - n} is negative")
    return Distribution(n, np.maximum(mass, 0.0))


def w2_value(l: int, m: int, env: Environment) -> float:
    """
    The environment-dependent remainder W_2 in

        P^ω_n(x) = P^0_n(x) + W_1(ω_0) + W_2(ω),

    built from the closed-form amplitudes and phase factors.
    """
    h = hadamard_amplitudes(l, m)
    t = phase_factors(l, m, env)
    w0 = env.phase(0)
    k = 1 + cmath.exp(2j * w0)
    im_pr = (k * t.theta_p * complex(t.theta_r).conjugate()).imag
    im_sq = (k * t.theta_s * complex(t.theta_q).conjugate()).imag
    return -0.5 * h.r_h * (h.p_h * im_pr + h.q_h * im_sq)


def w2_vanishes_check(l: int, m: int, env: Environment) -> float:
    """|W_2| at (l, m); zero up to rounding."""
    return abs(w2_value(l, m, env))
