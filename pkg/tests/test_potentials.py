import math

import numpy as np
import pytest

from chebyhmc import (
    ConvergenceError,
    LabeledDataset,
    PotentialSpec,
    SpectralBounds,
    gaussian_general,
    gaussian_mixture,
    hard_potential,
    hessian_extreme_eigs,
    load_labeled_csv,
    logistic_regression,
    make_potential,
    newton_map,
    correlated_gaussian,
    symmetric_mixture,
    quadratic_diag,
)


def fd_gradient(p, x, eps=1e-6):
    return np.array([(p.value(x + e) - p.value(x - e)) / (2 * eps) for e in np.eye(p.dim) * eps])


def toy_logistic(alpha=1.0, n=40, seed=0):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, 3))
    y = np.where(z[:, 0] - z[:, 2] + 0.5 * rng.standard_normal(n) > 0, 1.0, -1.0)
    return logistic_regression(LabeledDataset(z, y), alpha=alpha)


ALL = {
    "quadratic": lambda: quadratic_diag([1.0, 100.0]),
    "gaussian": correlated_gaussian,
    "mixture": symmetric_mixture,
    "logistic": toy_logistic,
    "hard": lambda: hard_potential(50.0, 0.01, 10),
}


@pytest.mark.parametrize("name", ALL)
def test_gradient_matches_finite_differences(name):
    p = ALL[name]()
    rng = np.random.default_rng(1)
    for _ in range(10):
        x = rng.standard_normal(p.dim)
        np.testing.assert_allclose(p.gradient(x), fd_gradient(p, x), rtol=1e-6, atol=1e-6)


@pytest.mark.parametrize("name", ALL)
def test_batched_evaluation(name):
    p = ALL[name]()
    X = np.random.default_rng(2).standard_normal((7, p.dim))
    np.testing.assert_allclose(p.value(X), [p.value(x) for x in X], rtol=1e-13)
    np.testing.assert_allclose(p.gradient(X), [p.gradient(x) for x in X], rtol=1e-13)


@pytest.mark.parametrize("name", ALL)
def test_hessian_matches_gradient_differences(name):
    p = ALL[name]()
    x = np.random.default_rng(3).standard_normal(p.dim) * 0.3
    eps = 1e-6
    H = np.column_stack([(p.gradient(x + e) - p.gradient(x - e)) / (2 * eps) for e in np.eye(p.dim) * eps])
    np.testing.assert_allclose(p.hessian(x), H, rtol=1e-5, atol=1e-5)


class TestQuadratic:
    def test_examples(self):
        p = quadratic_diag([1.0])
        assert p.value(np.array([2.0])) == 4.0
        np.testing.assert_array_equal(p.gradient(np.array([2.0])), [4.0])
        q = quadratic_diag([1.0, 100.0])
        assert q.value(np.zeros(2)) == 0.0
        np.testing.assert_array_equal(q.gradient(np.zeros(2)), [0.0, 0.0])

    def test_truth(self):
        p = quadratic_diag([1.0, 100.0])
        np.testing.assert_allclose(p.truth[1], np.diag([0.5, 0.005]))
        assert p.bounds == SpectralBounds(1.0, 100.0)

    @pytest.mark.parametrize("lam", [[0.0, 1.0], [-1.0], []])
    def test_rejects(self, lam):
        with pytest.raises(ValueError):
            quadratic_diag(lam)


class TestGaussian:
    def test_default_bounds(self):
        p = correlated_gaussian()
        assert p.bounds.m == pytest.approx(0.01, rel=0.01)
        assert p.bounds.L == pytest.approx(1.0, rel=0.01)

    def test_identity_minimum(self):
        mu = np.array([1.0, -2.0, 0.5])
        p = gaussian_general(mu, np.eye(3))
        assert p.value(mu) == 0.0
        np.testing.assert_array_equal(p.gradient(mu), np.zeros(3))

    def test_diag_eigs(self):
        p = gaussian_general([0, 0], np.diag([1.0, 100.0]))
        assert (p.bounds.m, p.bounds.L) == pytest.approx((0.01, 1.0))

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            gaussian_general([0, 0], [[1.0, 2.0], [2.0, 1.0]])


class TestMixture:
    def test_default_bounds(self):
        p = symmetric_mixture()
        assert (p.bounds.m, p.bounds.L) == pytest.approx((1.0, 10.0))

    def test_zero_shift(self):
        Sigma = np.diag([1.0, 2.0])
        p = gaussian_mixture(np.zeros(2), Sigma)
        x = np.array([0.3, -1.0])
        assert p.value(x) == pytest.approx(0.5 * x @ np.linalg.solve(Sigma, x) - math.log(2))
        np.testing.assert_allclose(p.gradient(np.zeros(2)), 0.0, atol=1e-15)

    def test_density_is_mixture(self):
        # exp(-f) must be proportional to 0.5 N(a, Sigma) + 0.5 N(-a, Sigma)
        p = symmetric_mixture(4)
        a = np.sqrt(np.arange(1, 5)) / 8
        Sigma = np.diag(np.arange(1, 5) / 4)
        P = np.linalg.inv(Sigma)
        X = np.random.default_rng(4).standard_normal((20, 4))
        mix = np.array([np.exp(-0.5 * (x - a) @ P @ (x - a)) + np.exp(-0.5 * (x + a) @ P @ (x + a)) for x in X])
        ratio = np.exp(-p.value(X)) / mix
        np.testing.assert_allclose(ratio, ratio[0], rtol=1e-10)

    def test_gate(self):
        Sigma = np.diag([4.0, 1.0])
        with pytest.raises(ValueError):
            gaussian_mixture([2.0, 0.0], Sigma)
        with pytest.raises(ValueError):
            gaussian_mixture([3.0, 0.0], Sigma)
        gaussian_mixture([1.9, 0.0], Sigma)

    def test_truth(self):
        p = symmetric_mixture(3)
        a = np.sqrt(np.arange(1, 4)) / 6
        np.testing.assert_allclose(p.truth[1], np.diag(np.arange(1, 4) / 3) + np.outer(a, a))


class TestLogistic:
    def test_single_point(self):
        p = logistic_regression(LabeledDataset([[1.0]], [1.0]), alpha=1.0)
        assert p.value(np.zeros(1)) == pytest.approx(math.log(2))
        np.testing.assert_allclose(p.gradient(np.zeros(1)), [-0.5])

    def test_at_origin(self):
        p = toy_logistic(alpha=2.0)
        # the prior contributes nothing at w = 0
        assert p.value(np.zeros(p.dim)) == pytest.approx(40 * math.log(2))

    def test_m_ge_alpha(self):
        p = toy_logistic(alpha=1.5)
        rng = np.random.default_rng(5)
        for w in rng.standard_normal((30, p.dim)) * 3:
            assert hessian_extreme_eigs(p, w).m >= 1.5 - 1e-10
        assert p.bounds.m >= 1.5 - 1e-10

    def test_pure_prior(self):
        p = logistic_regression(LabeledDataset(np.zeros((5, 2)), [1, -1, 1, 1, -1]), alpha=1.0)
        b = hessian_extreme_eigs(p, np.zeros(2))
        assert (b.m, b.L) == pytest.approx((1.0, 1.0))

    def test_mode_is_stationary(self):
        p = toy_logistic()
        assert np.linalg.norm(p.gradient(np.asarray(p.params["mode"]))) <= 1e-8

    def test_rejects(self):
        with pytest.raises(ValueError):
            LabeledDataset([[np.nan]], [1.0])
        with pytest.raises(ValueError):
            LabeledDataset([[1.0]], [0.0])
        with pytest.raises(ValueError):
            logistic_regression(LabeledDataset(np.zeros((0, 2)), []), alpha=1.0)
        with pytest.raises(ValueError):
            toy_logistic(alpha=0.0)

    def test_csv(self, tmp_path):
        f = tmp_path / "d.csv"
        f.write_text("a,b,label\n1,2,1\n3,1,0\n0,0,1\n2,5,0\n")
        data = load_labeled_csv(f)
        np.testing.assert_array_equal(data.labels, [1, -1, 1, -1])
        np.testing.assert_allclose(data.features.mean(0), 0.0, atol=1e-14)
        raw = load_labeled_csv(f, standardize=False)
        np.testing.assert_array_equal(raw.features[0], [1.0, 2.0])
        p = make_potential("logistic", csv=str(f), alpha=1.0)
        assert p.dim == 2


class TestHard:
    def test_origin(self):
        p = hard_potential(50.0, 0.01, 10)
        assert p.value(np.zeros(10)) == pytest.approx(-9 * 50 * 0.01 / 3)
        np.testing.assert_array_equal(p.gradient(np.zeros(10)), np.zeros(10))

    def test_one_dimensional(self):
        p = hard_potential(50.0, 0.01, 1)
        assert p.value(np.array([3.0])) == 4.5
        np.testing.assert_array_equal(p.gradient(np.array([3.0])), [3.0])

    def test_gradient_example(self):
        p = hard_potential(50.0, 0.01, 10)
        x = np.zeros(10)
        x[1] = 1.0
        assert p.gradient(x)[1] == pytest.approx(100 / 3 + 50 * 0.1 / 3 * math.sin(10.0), rel=1e-14)
        assert p.gradient(x)[1] == pytest.approx(32.4266, abs=1e-4)

    def test_curvature_range(self):
        kappa = 50.0
        p = hard_potential(kappa, 0.01, 2)
        xs = np.linspace(-2, 2, 2001)
        second = [p.hessian(np.array([x, x]))[1, 1] for x in xs]
        assert min(second) >= kappa / 3 - 1e-12 and max(second) <= kappa + 1e-12
        assert p.bounds == SpectralBounds(1.0, kappa)

    def test_rejects(self):
        with pytest.raises(ValueError):
            hard_potential(0.5, 0.01, 3)
        with pytest.raises(ValueError):
            hard_potential(5.0, 0.0, 3)


class TestNewton:
    def test_quadratic_one_step(self):
        p = quadratic_diag([1.0, 100.0])
        np.testing.assert_allclose(newton_map(p, np.array([3.0, -4.0]), max_iter=1), [0.0, 0.0], atol=1e-14)

    def test_fixed_point(self):
        p = toy_logistic()
        w = np.asarray(p.params["mode"])
        np.testing.assert_allclose(newton_map(p, w), w, atol=1e-8)

    def test_nonconvergence(self):
        p = toy_logistic()
        with pytest.raises(ConvergenceError):
            newton_map(p, np.full(p.dim, 5.0), tol=1e-300, max_iter=2)

    def test_singular(self):
        p = PotentialSpec(
            name="flat", dim=1, value=lambda x: np.sum(np.asarray(x) * 0 + 1, axis=-1),
            gradient=lambda x: np.ones_like(np.asarray(x, float)), hessian=lambda x: np.zeros((1, 1)),
            bounds=SpectralBounds(1, 1),
        )
        with pytest.raises(ConvergenceError):
            newton_map(p, np.zeros(1))


def test_hessian_extremes_quadratic():
    b = hessian_extreme_eigs(quadratic_diag([1.0, 100.0]), np.zeros(2))
    assert (b.m, b.L) == (2.0, 200.0)


def test_hessian_asymmetry():
    p = PotentialSpec(
        name="bad", dim=2, value=lambda x: 0.0, gradient=lambda x: x, bounds=SpectralBounds(1, 1),
        hessian=lambda x: np.array([[1.0, 1e-3], [0.0, 1.0]]),
    )
    with pytest.raises(ValueError):
        hessian_extreme_eigs(p, np.zeros(2))


def test_make_potential_names():
    assert make_potential("quadratic", eigenvalues=[1, 2]).dim == 2
    assert make_potential("gaussian").name == correlated_gaussian().name
    assert make_potential("mixture", d=5).dim == 5
    assert make_potential("hard", h=0.01).dim == 10
    with pytest.raises(ValueError):
        make_potential("banana")
