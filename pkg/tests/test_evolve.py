import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from qwre.coin import PHI_STAR, ChiralityVector
from qwre.environment import Environment, EnvironmentSpec, PhaseMeasure
from qwre.errors import InvalidArgumentError
from qwre.evolve import (
    Distribution,
    annealed_exact,
    annealed_monte_carlo,
    characteristic_function,
    distribution,
    evolve_batch,
    evolve_to,
    initial_state,
    step,
)
from qwre.pathsum import oracle_distribution

from conftest import random_env


def n4_table(s):
    return {-4: (1 + s) / 16, -2: (6 + 4 * s) / 16, 0: 2 / 16, 2: (6 - 4 * s) / 16, 4: (1 - s) / 16}


def assert_dist(dist, expected, tol=1e-12):
    for x, p in expected.items():
        assert dist.prob(x) == pytest.approx(p, abs=tol), x


def test_initial_state_phi_star():
    st = initial_state(PHI_STAR)
    assert st.time == 0
    assert st.amplitude_at(0) == PHI_STAR


def test_initial_state_basis_and_custom():
    assert initial_state(ChiralityVector(1, 0)).amplitude_at(0) == ChiralityVector(1, 0)
    initial_state(ChiralityVector(0.6, 0.8j))
    with pytest.raises(InvalidArgumentError):
        initial_state(ChiralityVector(1, 1))


def test_time_zero_distribution():
    assert distribution(initial_state()).as_dict() == {0: pytest.approx(1.0)}
    assert evolve_to(PHI_STAR, Environment(), 0).as_dict() == {0: pytest.approx(1.0)}


@pytest.mark.parametrize("omega0", [0.0, 0.4, -1.1, math.pi / 2])
def test_one_step(omega0, rng):
    env = random_env(rng, 3).with_phase(0, omega0)
    s = math.sin(omega0)
    assert_dist(evolve_to(PHI_STAR, env, 1), {-1: (1 + s) / 2, 1: (1 - s) / 2})
    assert_dist(oracle_distribution(env, 1), {-1: (1 + s) / 2, 1: (1 - s) / 2})


def test_four_steps_hadamard():
    assert_dist(evolve_to(PHI_STAR, Environment(), 4), {-4: 1 / 16, -2: 6 / 16, 0: 2 / 16, 2: 6 / 16, 4: 1 / 16})


def test_four_steps_pi_over_six():
    expected = {-4: 1.5 / 16, -2: 8 / 16, 0: 2 / 16, 2: 4 / 16, 4: 0.5 / 16}
    assert n4_table(0.5) == pytest.approx(expected)
    env = Environment.constant(math.pi / 6)
    assert_dist(evolve_to(PHI_STAR, env, 4), expected)
    assert_dist(oracle_distribution(env, 4), expected)


def test_four_steps_pi_over_two(rng):
    expected = {-4: 2 / 16, -2: 10 / 16, 0: 2 / 16, 2: 2 / 16, 4: 0.0}
    env = random_env(rng, 4).with_phase(0, math.pi / 2)
    assert_dist(evolve_to(PHI_STAR, env, 4), expected)
    assert_dist(oracle_distribution(env, 4), expected)


def test_only_origin_phase_matters_at_n4(rng):
    a = random_env(rng, 4).with_phase(0, 0.9)
    b = random_env(rng, 4).with_phase(0, 0.9)
    np.testing.assert_allclose(evolve_to(PHI_STAR, a, 4).mass, evolve_to(PHI_STAR, b, 4).mass, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 7, 100, 500])
def test_hadamard_symmetry(n):
    m = evolve_to(PHI_STAR, Environment(), n).mass
    np.testing.assert_allclose(m, m[::-1], atol=1e-12)


def test_norm_and_parity_preserved(rng):
    env = random_env(rng, 300)
    st = initial_state()
    for _ in range(300):
        st = step(st, env)
        assert abs(st.norm2() - 1.0) < 1e-10
    dense = st.dense()
    assert np.all(dense[:, 1::2] == 0)
    assert st.amplitude_at(1) == ChiralityVector(0j, 0j)
    assert st.amplitude_at(301) == ChiralityVector(0j, 0j)


def test_norm_drift_long_run(rng):
    n = 10_000
    windows = rng.uniform(-math.pi, math.pi, (1, 2 * n + 1))
    probs = evolve_batch(PHI_STAR, windows, n)
    assert abs(probs.sum() - 1.0) < 1e-9


def test_step_matches_recursion_by_hand():
    # ψ_1(-1) = P_0 φ, ψ_1(1) = Q_0 φ with the coin at the origin
    omega = 0.37
    env = Environment({0: omega})
    st = step(initial_state(), env)
    e = np.exp(1j * omega)
    L, R = PHI_STAR.left, PHI_STAR.right
    assert st.amplitude_at(-1).left == pytest.approx((e * L + R) / math.sqrt(2))
    assert st.amplitude_at(-1).right == 0
    assert st.amplitude_at(1).right == pytest.approx((L - np.conj(e) * R) / math.sqrt(2))
    assert st.amplitude_at(1).left == 0


@pytest.mark.parametrize("seed", range(10))
def test_matches_oracle_small_n(seed):
    rng = np.random.default_rng(seed)
    env = random_env(rng, 10)
    for n in range(1, 11):
        np.testing.assert_allclose(evolve_to(PHI_STAR, env, n).mass, oracle_distribution(env, n).mass, atol=1e-12)


def test_batch_matches_single(rng):
    windows = rng.uniform(-math.pi, math.pi, (5, 2 * 30 + 1))
    batch = evolve_batch(PHI_STAR, windows, 30)
    for row, w in zip(batch, windows):
        env = Environment.from_window(-30, w)
        np.testing.assert_allclose(row, evolve_to(PHI_STAR, env, 30).mass, atol=1e-14)


def test_batch_window_too_small():
    with pytest.raises(InvalidArgumentError):
        evolve_batch(PHI_STAR, np.zeros((1, 3)), 5)


def test_custom_qubit_evolves(rng):
    q = ChiralityVector(0.6, 0.8j)
    env = random_env(rng, 8)
    np.testing.assert_allclose(evolve_to(q, env, 8).mass, oracle_distribution(env, 8, q).mass, atol=1e-12)


def test_distribution_validation():
    with pytest.raises(InvalidArgumentError):
        Distribution(2, [0.5, 0.5])
    with pytest.raises(InvalidArgumentError):
        Distribution.from_mapping(2, {1: 0.5})
    d = Distribution.from_mapping(2, {-2: 0.25, 0: 0.5, 2: 0.25})
    d.check()
    with pytest.raises(InvalidArgumentError):
        Distribution(1, [0.7, 0.7]).check()


def test_characteristic_function_basics():
    d = evolve_to(PHI_STAR, Environment(), 4)
    assert characteristic_function(d, 0.0) == pytest.approx(1.0, abs=1e-15)
    # five-point Hadamard law at ξ = π: -1/16·2 + 2/16 + 6/16·(i - i) = 0
    assert abs(characteristic_function(d, math.pi)) < 1e-15
    assert abs(characteristic_function(d, 1.3).imag) < 1e-12
    assert characteristic_function(Distribution(0, [1.0]), 5.0) == 1.0


def test_annealed_two_point_exact_is_hadamard():
    d = annealed_exact(PhaseMeasure.two_point(math.pi / 3), 4)
    assert_dist(d, n4_table(0.0))


def test_annealed_exact_uniform_matches_linear_combination():
    m = PhaseMeasure.uniform(0.0, math.pi)
    d = annealed_exact(m, 6)
    # direct: average of quenched laws over a fine grid of ω_0 (trapezoid rule)
    grid = np.linspace(0.0, math.pi, 2001)
    laws = np.array([evolve_to(PHI_STAR, Environment({0: w}), 6).mass for w in grid])
    direct = trapezoid(laws, grid, axis=0) / math.pi
    np.testing.assert_allclose(d.mass, direct, atol=1e-6)


def test_annealed_monte_carlo_uniform():
    spec = EnvironmentSpec(PhaseMeasure.uniform(-math.pi, math.pi))
    est = annealed_monte_carlo(spec, 4, 20000, seed=1)
    exact = np.array(list(n4_table(0.0).values()))
    assert np.all(np.abs(est.mean.mass - exact) <= 4 * est.stderr + 1e-12)
    assert est.mean.total() == pytest.approx(1.0, abs=1e-12)
