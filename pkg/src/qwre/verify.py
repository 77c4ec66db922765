"""
Cross-checks between the independent routes to the same quantities.

Each suite returns a :class:`SuiteResult` with the largest discrepancy it saw.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .closedform import (
    amplitudes_via_jacobi,
    binomial_sum,
    hadamard_amplitudes,
    jacobi_p,
    quenched_distribution_prop2,
    reciprocal_binomial_sum,
    w2_vanishes_check,
    xi_coefficients_closed,
)
from .coin import PHI_STAR, coin_from_phase
from .environment import Environment
from .evolve import evolve_batch, evolve_to
from .limit import limit_moments, quadrature_moments, quenched_limit_density
from .pathsum import (
    basis_matrices,
    distribution_from_coefficients,
    oracle_coefficients,
    path_matrix,
    random_word,
    reduce_word,
)

__all__ = ["SuiteResult", "SUITES", "random_environment", "run_suites", "w2_branch_cases"]


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    max_error: float
    tolerance: float
    seconds: float = 0.0
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"{status}  {self.name:<10} max_error={self.max_error:.3e}  tol={self.tolerance:g}  [{self.seconds:.2f}s]{extra}"


def random_environment(rng: np.random.Generator, extent: int) -> Environment:
    """Phases uniform on [-π, π) at sites -extent..extent."""
    return Environment.from_window(-extent, rng.uniform(-math.pi, math.pi, 2 * extent + 1))


def _relerr(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def suite_oracle(cap: int = 12, n_envs: int = 20, seed: int = 0, tol: float = 1e-10) -> SuiteResult:
    """Distributions: state vector vs path sum vs Hadamard law + correction."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    hadamard = {n: evolve_to(PHI_STAR, Environment(), n) for n in range(1, cap + 1)}
    for _ in range(n_envs):
        env = random_environment(rng, cap)
        for n in range(1, cap + 1):
            a = evolve_to(PHI_STAR, env, n).mass
            b = distribution_from_coefficients(oracle_coefficients(env, n, cap), env).mass
            c = quenched_distribution_prop2(n, env.phase(0), hadamard[n]).mass
            worst = max(worst, np.max(np.abs(a - b)), np.max(np.abs(a - c)), np.max(np.abs(b - c)))
    return SuiteResult("oracle", worst < tol, float(worst), tol, detail=f"n<={cap}, {n_envs} envs")


def suite_pqrs(cap: int = 12, n_envs: int = 20, seed: int = 1, tol: float = 1e-10) -> SuiteResult:
    """Coefficients: path-sum accumulation vs closed forms."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_envs):
        env = random_environment(rng, cap)
        for n in range(1, cap + 1):
            for m, c in enumerate(oracle_coefficients(env, n, cap)):
                worst = max(worst, c.max_abs_diff(xi_coefficients_closed(n - m, m, env)))
    return SuiteResult("pqrs", worst < tol, float(worst), tol, detail=f"n<={cap}, {n_envs} envs")


def suite_table(max_len: int = 10, n_envs: int = 50, seed: int = 2, tol: float = 1e-13) -> SuiteResult:
    """Product-table reduction vs explicit matrix products."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    index = {"P": 0, "Q": 1, "R": 2, "S": 3}
    for _ in range(n_envs):
        env = random_environment(rng, max_len)
        basis = basis_matrices(coin_from_phase(env.phase(0)))
        for length in range(1, max_len + 1):
            word = random_word(rng, length)
            scalar, block = reduce_word(word, env)
            worst = max(worst, float(np.max(np.abs(scalar * basis[index[block]] - path_matrix(word, env)))))
    return SuiteResult("table", worst < tol, worst, tol, detail=f"words up to {max_len}, {n_envs} envs")


def w2_branch_cases(max_n: int = 10) -> list[tuple[int, int]]:
    """(l, m) pairs covering every phase-factor branch and both one-sided boundaries."""
    cases = []
    for n in range(1, max_n + 1):
        for l in range(n + 1):
            cases.append((l, n - l))
    return cases


def suite_w2(max_n: int = 10, n_envs: int = 50, seed: int = 3, tol: float = 1e-12) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    cases = w2_branch_cases(max_n)
    for _ in range(n_envs):
        env = random_environment(rng, max_n)
        for l, m in cases:
            worst = max(worst, w2_vanishes_check(l, m, env))
    return SuiteResult("w2", worst < tol, worst, tol, detail=f"{len(cases)} (l,m) cases, {n_envs} envs")


def suite_jacobi(max_n: int = 60, tol: float = 1e-9) -> SuiteResult:
    """Binomial sums vs Jacobi forms (both sum identities and the amplitude forms)."""
    worst = 0.0
    for n in range(2, max_n + 1):
        for l in range(1, n // 2 + 1):
            k = l
            worst = max(worst, _relerr(float(reciprocal_binomial_sum(k, n)),
                                       float(2 ** (k - 1) * jacobi_p(k - 1, 1, n - 2 * k, 0) / k)))
            worst = max(worst, _relerr(float(binomial_sum(k, n)),
                                       float(2 ** (k - 1) * jacobi_p(k - 1, 0, n - 2 * k, 0))))
            h = hadamard_amplitudes(l, n - l)
            pj, qj = amplitudes_via_jacobi(l, n)
            worst = max(worst, _relerr(h.p_h, pj), _relerr(h.q_h, qj))
    return SuiteResult("jacobi", worst < tol, worst, tol, detail=f"n<={max_n}")


def suite_locality(n_values=(4, 50, 500), n_envs: int = 20, seed: int = 4, tol: float = 1e-12) -> SuiteResult:
    """Laws depend on the environment only through the origin phase."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for omega0 in rng.uniform(-math.pi, math.pi, 3):
        for n in n_values:
            windows = rng.uniform(-math.pi, math.pi, (n_envs, 2 * n + 1))
            windows[:, n] = omega0
            probs = evolve_batch(PHI_STAR, windows, n)
            worst = max(worst, float(np.max(np.abs(probs - probs[0]))))
    return SuiteResult("locality", worst < tol, worst, tol, detail=f"n in {tuple(n_values)}, {n_envs} envs")


def suite_limit(tol: float = 1e-8) -> SuiteResult:
    """Normalization and closed-form moments of the limit densities."""
    worst = 0.0
    for omega0 in (0.0, math.pi / 6, math.pi / 3, math.pi / 2, -math.pi / 4):
        d = quenched_limit_density(omega0)
        total, mean, var = quadrature_moments(d)
        cm, cv = limit_moments(d)
        worst = max(worst, abs(total - 1.0), abs(mean - cm), abs(var - cv))
    return SuiteResult("limit", worst < tol, worst, tol)


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "oracle": suite_oracle,
    "pqrs": suite_pqrs,
    "table": suite_table,
    "w2": suite_w2,
    "jacobi": suite_jacobi,
    "locality": suite_locality,
    "limit": suite_limit,
}


def run_suites(names=None, cap: int = 12, seed: int = 0) -> list[SuiteResult]:
    names = list(names) if names else list(SUITES)
    results = []
    for name in names:
        fn = SUITES[name]
        t0 = time.perf_counter()
        if name in ("oracle", "pqrs"):
            res = fn(cap=cap, seed=seed + (0 if name == "oracle" else 1))
        else:
            res = fn()
        results.append(SuiteResult(res.name, res.passed, res.max_error, res.tolerance,
                                   time.perf_counter() - t0, res.detail))
    return results
