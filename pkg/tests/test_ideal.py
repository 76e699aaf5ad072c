import math

import numpy as np
import pytest

from chebyhmc import (
    PhaseState,
    SpectralBounds,
    chebyshev_schedule,
    constant_schedule,
    contraction_factor,
    coupled_deviation,
    exact_flow,
    gaussian_general,
    ideal_chain,
    ideal_ensemble,
    ideal_hmc_run,
    quadratic_diag,
    rate_bound,
)
from chebyhmc.diagnostics import cov_frobenius_error
from chebyhmc.ideal import contraction_curve, hamiltonian

B = SpectralBounds(1.0, 100.0)


class TestExactFlow:
    def test_time_zero(self):
        s0 = PhaseState(np.array([1.0, -2.0]), np.array([0.5, 3.0]))
        s = exact_flow([1.0, 4.0], s0, 0.0)
        np.testing.assert_array_equal(s.x, s0.x)
        np.testing.assert_array_equal(s.v, s0.v)

    def test_quarter_and_half_period(self):
        lam, x0, v0 = 3.0, 0.7, -1.3
        w = math.sqrt(2 * lam)
        q = exact_flow([lam], PhaseState([x0], [v0]), math.pi / (2 * w))
        assert q.x[0] == pytest.approx(v0 / w, abs=1e-14)
        assert q.v[0] == pytest.approx(-w * x0, abs=1e-14)
        h = exact_flow([lam], PhaseState([x0], [v0]), math.pi / w)
        assert h.x[0] == pytest.approx(-x0, abs=1e-14)
        assert h.v[0] == pytest.approx(-v0, abs=1e-14)

    def test_energy(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            d = int(rng.integers(1, 5))
            lam = rng.uniform(0.01, 100, d)
            s0 = PhaseState(rng.standard_normal(d), rng.standard_normal(d))
            s = exact_flow(lam, s0, rng.uniform(0, 30))
            assert hamiltonian(lam, s) == pytest.approx(hamiltonian(lam, s0), rel=1e-10)

    def test_rejects(self):
        with pytest.raises(ValueError):
            exact_flow([0.0], PhaseState([1.0], [1.0]), 1.0)
        with pytest.raises(ValueError):
            PhaseState([1.0, 2.0], [1.0])
        with pytest.raises(ValueError):
            PhaseState([np.inf], [1.0])


class TestCoupling:
    def test_examples(self):
        x0 = np.array([1.0, 2.0])
        np.testing.assert_array_equal(coupled_deviation([1.0, 2.0], x0, x0, 0.7), [0.0, 0.0])
        np.testing.assert_array_equal(coupled_deviation([1.0, 2.0], x0, -x0, 0.0), 2 * x0)
        assert coupled_deviation([2.0], [1.0], [0.0], math.pi / 4)[0] == pytest.approx(0.0, abs=1e-16)

    def test_matches_two_flows(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            d = int(rng.integers(1, 5))
            lam = rng.uniform(0.01, 100, d)
            x0, y0, xi = rng.standard_normal((3, d))
            t = rng.uniform(0, 30)
            gap = exact_flow(lam, PhaseState(x0, xi), t).x - exact_flow(lam, PhaseState(y0, xi), t).x
            np.testing.assert_allclose(gap, coupled_deviation(lam, x0, y0, t), atol=1e-12, rtol=0)


class TestContraction:
    def test_constant_at_L(self):
        assert contraction_factor([100.0], constant_schedule(5, B)) == pytest.approx(0.0, abs=1e-15)

    def test_contraction_bound(self):
        lam = np.linspace(1, 100, 512)
        for K in range(1, 65):
            assert contraction_factor(lam, chebyshev_schedule(K, B, "random", seed=K)) <= rate_bound(K, B) + 1e-12

    def test_figure_values(self):
        lam = np.arange(1.0, 100.0001, 0.1)
        cheb = contraction_factor(lam, chebyshev_schedule(400, B, "random", seed=0))
        assert cheb <= 2 * (9 / 11) ** 400
        const = contraction_factor([1.0], constant_schedule(400, B))
        assert const == pytest.approx(math.cos(0.05 * math.pi) ** 400, rel=1e-12)
        assert const == pytest.approx(7.0465e-3, abs=1e-7)

    def test_curve_starts_at_one(self):
        c = contraction_curve(np.linspace(1, 100, 50), constant_schedule(30, B))
        assert c[0] == 1.0 and c.size == 31
        assert np.all(np.diff(c) <= 1e-15)

    def test_curve_long_schedule_no_underflow(self):
        c = contraction_curve(np.linspace(1, 100, 50), chebyshev_schedule(2000, B, "random", seed=0))
        assert np.all(np.isfinite(c))


class TestIdealRuns:
    def test_quarter_period_sample(self):
        lam = 2.0
        s = constant_schedule(1, SpectralBounds(lam, lam))
        tr = ideal_hmc_run([lam], s, [5.0], seed=3)
        xi = np.random.Generator(np.random.PCG64(np.random.SeedSequence(3, spawn_key=(0, 0)))).standard_normal(1)
        assert tr.states[1, 0] == pytest.approx(xi[0] / math.sqrt(2 * lam), abs=1e-14)

    def test_determinism(self):
        s = chebyshev_schedule(20, B, "random", seed=1)
        a = ideal_hmc_run([1.0, 100.0], s, [1.0, 1.0], seed=5)
        b = ideal_hmc_run([1.0, 100.0], s, [1.0, 1.0], seed=5)
        np.testing.assert_array_equal(a.states, b.states)
        c = ideal_hmc_run([1.0, 100.0], s, [1.0, 1.0], seed=6)
        assert not np.array_equal(a.states, c.states)

    def test_ensemble_matches_single_chains(self):
        p = quadratic_diag([1.0, 7.0, 100.0])
        s = chebyshev_schedule(25, B, "random", seed=2)
        X0 = np.random.default_rng(0).standard_normal((4, 3))
        traj = ideal_ensemble(p, s, X0, seed=11, keep_trajectory=True)
        for i in range(4):
            solo = ideal_chain(p, s, X0[i], seed=11, chain_id=i)
            np.testing.assert_array_equal(traj[:, i], solo.states)

    def test_general_gaussian_rotated(self):
        # a correlated Gaussian must be simulated in its eigenbasis
        mu = np.array([0.0, 1.0])
        Sigma = np.array([[1.0, 0.5], [0.5, 100.0]])
        p = gaussian_general(mu, Sigma)
        s = chebyshev_schedule(30, p.bounds, "random", seed=0)
        X = ideal_ensemble(p, s, np.tile(mu, (20_000, 1)), seed=1)
        np.testing.assert_allclose(X.mean(0), mu, atol=0.2)
        assert cov_frobenius_error(X, Sigma) / np.linalg.norm(Sigma) < 0.05

    def test_stationarity(self):
        lam = np.array([1.0, 100.0])
        p = quadratic_diag(lam)
        Sigma = p.truth[1]
        X0 = np.random.default_rng(2).multivariate_normal(np.zeros(2), Sigma, size=10_000)
        X = ideal_ensemble(p, chebyshev_schedule(20, p.bounds, "random", seed=3), X0, seed=4)
        assert cov_frobenius_error(X, Sigma) / np.linalg.norm(Sigma) < 0.05

    def test_non_quadratic_rejected(self):
        from chebyhmc import symmetric_mixture

        p = symmetric_mixture()
        with pytest.raises(ValueError):
            ideal_chain(p, constant_schedule(3, p.bounds), np.zeros(p.dim), seed=0)

    def test_coupled_chains_contract_exactly(self):
        lam = np.array([1.0, 30.0, 100.0])
        p = quadratic_diag(lam)
        s = chebyshev_schedule(12, B, "random", seed=5)
        X0 = np.random.default_rng(6).standard_normal((50, 3))
        gap0 = np.array([0.3, -1.0, 2.0])
        X = ideal_ensemble(p, s, X0, seed=7)
        Y = ideal_ensemble(p, s, X0 + gap0, seed=7)
        factor = np.prod(np.cos(np.outer(s.times, np.sqrt(2 * lam))), axis=0)
        np.testing.assert_allclose(Y - X, np.tile(factor * gap0, (50, 1)), atol=1e-12)
