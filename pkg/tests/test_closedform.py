import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import legendre
from scipy.special import eval_jacobi

from qwre.closedform import (
    amplitudes_via_jacobi,
    binomial_sum,
    hadamard_amplitudes,
    jacobi_p,
    phase_factors,
    quenched_distribution_prop2,
    reciprocal_binomial_sum,
    w2_value,
    w2_vanishes_check,
    xi_coefficients_closed,
)
from qwre.coin import PHI_STAR
from qwre.environment import Environment
from qwre.errors import InternalConsistencyError, InvalidArgumentError, ResourceLimitError
from qwre.evolve import Distribution, evolve_to
from qwre.pathsum import xi_coefficients

from conftest import random_env

S = 1 / math.sqrt(2)


def test_amplitudes_3_1():
    h = hadamard_amplitudes(3, 1)
    assert h.p_h == pytest.approx(2 * S ** 3)
    assert h.q_h == 0
    assert h.r_h == h.s_h == pytest.approx(S ** 3)


@pytest.mark.parametrize("n", [1, 2, 5, 13])
def test_amplitudes_boundaries(n):
    left = hadamard_amplitudes(n, 0)
    assert left.p_h == pytest.approx(S ** (n - 1))
    assert (left.q_h, left.r_h, left.s_h) == (0, 0, 0)
    right = hadamard_amplitudes(0, n)
    assert right.q_h == pytest.approx((-S) ** (n - 1))
    assert (right.p_h, right.r_h, right.s_h) == (0, 0, 0)


def test_r_equals_s_everywhere():
    for n in range(1, 40):
        for l in range(n + 1):
            h = hadamard_amplitudes(l, n - l)
            assert h.r_h == h.s_h


def test_amplitude_caps():
    with pytest.raises(ResourceLimitError):
        hadamard_amplitudes(40, 30)
    hadamard_amplitudes(40, 30, cap=100)
    with pytest.raises(InvalidArgumentError):
        hadamard_amplitudes(0, 0)


def test_phase_factors_3_1(env_factory):
    env = env_factory(4)
    w = env.phase
    t = phase_factors(3, 1, env)
    assert t.theta_p == pytest.approx(cmath.exp(1j * w(-1)))
    assert t.theta_q == pytest.approx(cmath.exp(1j * (w(0) + w(-1) + w(-2))))
    assert t.theta_r == pytest.approx(cmath.exp(1j * (w(0) + w(-1))))
    assert t.theta_s == pytest.approx(cmath.exp(1j * (w(-1) + w(-2))))


def test_phase_factors_diagonal(env_factory):
    env = env_factory(8)
    for l in range(1, 5):
        t = phase_factors(l, l, env)
        assert t.theta_r == 1 and t.theta_s == 1


def test_phase_factors_trivial_environment():
    env = Environment()
    for n in range(1, 12):
        for l in range(n + 1):
            t = phase_factors(l, n - l, env)
            assert (t.theta_p, t.theta_q, t.theta_r, t.theta_s) == (1, 1, 1, 1)


def test_phase_factors_unit_modulus(env_factory):
    env = env_factory(12)
    for n in range(1, 12):
        for l in range(n + 1):
            t = phase_factors(l, n - l, env)
            for v in (t.theta_p, t.theta_q, t.theta_r, t.theta_s):
                assert abs(abs(v) - 1) < 1e-12


def test_all_left_boundary_sign(env_factory):
    env = env_factory(8)
    for n in range(2, 9):
        oracle = xi_coefficients(n, 0, env).p
        ours = xi_coefficients_closed(n, 0, env).p
        printed = phase_factors(n, 0, env, printed_boundary=True).theta_p * hadamard_amplitudes(n, 0).p_h
        assert abs(ours - oracle) < 1e-12
        # the printed clause is the complex conjugate, off unless the phase sum is 0 mod π
        assert printed == pytest.approx(np.conj(ours))
        assert abs(printed - oracle) > 1e-6


def test_closed_form_1_1(env_factory):
    env = env_factory(2)
    closed = xi_coefficients_closed(1, 1, env)
    assert closed.max_abs_diff(xi_coefficients(1, 1, env)) < 1e-14


@pytest.mark.parametrize("seed", range(5))
def test_closed_form_matches_oracle(seed):
    env = random_env(np.random.default_rng(seed), 10)
    for n in range(1, 11):
        for l in range(n + 1):
            assert xi_coefficients_closed(l, n - l, env).max_abs_diff(xi_coefficients(l, n - l, env)) < 1e-12


def test_closed_form_zero_environment_is_hadamard_path_sum():
    env = Environment()
    for n in range(1, 11):
        for l in range(n + 1):
            c = xi_coefficients(l, n - l, env)
            h = hadamard_amplitudes(l, n - l)
            np.testing.assert_allclose(c.as_tuple(), (h.p_h, h.q_h, h.r_h, h.s_h), atol=1e-13)


# -- Jacobi -------------------------------------------------------------------

def test_jacobi_degree_zero():
    assert jacobi_p(0, 0.3, 2.5, 0.7) == 1
    assert jacobi_p(0, 1, 4, Fraction(1, 3)) == 1


@pytest.mark.parametrize("nu, mu, x", [(0.3, 1.7, 0.4), (0, 0, -0.2), (2.0, -0.5, 0.9)])
def test_jacobi_degree_one(nu, mu, x):
    assert jacobi_p(1, nu, mu, x) == pytest.approx((nu + 1) + (nu + mu + 2) * (x - 1) / 2)


def test_jacobi_legendre_special_case():
    assert jacobi_p(2, 0, 0, 0) == Fraction(-1, 2)
    for deg in range(8):
        for x in (-0.9, -0.1, 0.3, 0.77):
            coef = [0] * deg + [1]
            assert jacobi_p(deg, 0, 0, x) == pytest.approx(legendre.legval(x, coef), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(0, 15),
    nu=st.floats(-0.9, 5),
    mu=st.floats(-0.9, 5),
    x=st.floats(-1, 1),
)
def test_jacobi_against_scipy(n, nu, mu, x):
    assert jacobi_p(n, nu, mu, x) == pytest.approx(eval_jacobi(n, nu, mu, x), rel=1e-8, abs=1e-8)


def test_jacobi_exact_returns_fraction():
    v = jacobi_p(5, 1, 3, 0)
    assert isinstance(v, Fraction)
    assert float(v) == pytest.approx(eval_jacobi(5, 1, 3, 0), rel=1e-13)


@pytest.mark.parametrize("args", [(2, -1, 0, 0.0), (2, 0, -1.5, 0.0), (-1, 0, 0, 0.0), (1.5, 0, 0, 0.0)])
def test_jacobi_invalid(args):
    with pytest.raises(InvalidArgumentError):
        jacobi_p(*args)


def test_amplitudes_via_jacobi_1_4():
    h = hadamard_amplitudes(1, 3)
    p, q = amplitudes_via_jacobi(1, 4)
    assert p == pytest.approx(h.p_h, abs=1e-15)
    assert q == pytest.approx(h.q_h, abs=1e-15)


@pytest.mark.parametrize("l, n", [(0, 4), (3, 5), (-1, 2)])
def test_amplitudes_via_jacobi_range(l, n):
    with pytest.raises(InvalidArgumentError):
        amplitudes_via_jacobi(l, n)


def test_hypergeometric_identities_exact():
    for n in range(2, 61):
        for k in range(1, min(30, n // 2) + 1):
            assert reciprocal_binomial_sum(k, n) == Fraction(2 ** (k - 1), k) * jacobi_p(k - 1, 1, n - 2 * k, 0)
            assert binomial_sum(k, n) == 2 ** (k - 1) * jacobi_p(k - 1, 0, n - 2 * k, 0)


def test_jacobi_amplitudes_against_direct_sums():
    for n in range(2, 61):
        for l in range(1, n // 2 + 1):
            h = hadamard_amplitudes(l, n - l)
            p, q = amplitudes_via_jacobi(l, n)
            assert p == pytest.approx(h.p_h, rel=1e-9, abs=0)
            assert q == pytest.approx(h.q_h, rel=1e-9, abs=0)


# -- quenched law from the Hadamard law ----------------------------------------

def test_origin_correction_n4_table():
    had = evolve_to(PHI_STAR, Environment(), 4)
    for omega0 in (0.0, math.pi / 6, math.pi / 2, -math.pi / 4, 2.5):
        s = math.sin(omega0)
        d = quenched_distribution_prop2(4, omega0, had)
        np.testing.assert_allclose(d.mass, np.array([1 + s, 6 + 4 * s, 2, 6 - 4 * s, 1 - s]) / 16, atol=1e-14)


def test_origin_correction_identity_at_zero():
    had = evolve_to(PHI_STAR, Environment(), 9)
    np.testing.assert_array_equal(quenched_distribution_prop2(9, 0.0, had).mass, had.mass)


def test_origin_correction_matches_evolution(rng):
    hadamard = {n: evolve_to(PHI_STAR, Environment(), n) for n in range(1, 13)}
    for omega0 in rng.uniform(-math.pi, math.pi, 50):
        env = random_env(rng, 12).with_phase(0, omega0)
        for n in (1, 4, 7, 12):
            np.testing.assert_allclose(
                quenched_distribution_prop2(n, omega0, hadamard[n]).mass, evolve_to(PHI_STAR, env, n).mass, atol=1e-12
            )


def test_origin_correction_flags_bad_input():
    bogus = Distribution(3, [0.0, 0.5, 0.5, 0.0])
    with pytest.raises(InternalConsistencyError):
        quenched_distribution_prop2(3, -math.pi / 2, bogus)
    with pytest.raises(InvalidArgumentError):
        quenched_distribution_prop2(4, 0.1, bogus)


# -- W2 -------------------------------------------------------------------------

BRANCH_CASES = {
    "l-1>m": (5, 2),
    "l-1=m": (4, 3),
    "l-1<m": (3, 5),
    "l=m": (4, 4),
    "l<m": (2, 6),
    "(0,n)": (0, 7),
    "(n,0)": (7, 0),
}


@pytest.mark.parametrize("case", sorted(BRANCH_CASES))
def test_w2_vanishes(case, rng):
    l, m = BRANCH_CASES[case]
    for _ in range(50):
        env = random_env(rng, 8)
        assert w2_vanishes_check(l, m, env) < 1e-12


def test_w2_zero_environment_exact():
    for n in range(1, 12):
        for l in range(n + 1):
            assert w2_value(l, n - l, Environment()) == 0.0


def test_w2_is_the_remaining_gap(rng):
    # P^ω = P^0 + W1 + W2 with W1 the sin ω0 correction; W2 = 0 means evolution equals P^0 + W1
    env = random_env(rng, 6)
    had = evolve_to(PHI_STAR, Environment(), 6)
    full = evolve_to(PHI_STAR, env, 6)
    for m in range(7):
        l = 6 - m
        h = hadamard_amplitudes(l, m)
        w1 = 0.5 * (h.p_h ** 2 - h.q_h ** 2) * math.sin(env.phase(0))
        assert full.mass[m] == pytest.approx(had.mass[m] + w1 + w2_value(l, m, env), abs=1e-13)
