"""
Diagnostics
===========

ESS, covariance error, histogram TV distance and Gaussian W2.
"""

import numpy as np

from chebyhmc import cov_frobenius_error, discrete_tv, ess, gaussian_w2

rng = np.random.default_rng(0)

# %% ESS of independent draws is close to N; an AR(1) chain has far fewer
print("iid ESS:", round(ess(rng.standard_normal(10_000))))
x = np.zeros(100_000)
e = rng.standard_normal(x.size)
for t in range(1, x.size):
    x[t] = 0.9 * x[t - 1] + e[t]
print("AR(0.9) ESS:", round(ess(x)), "theory", round(x.size * 0.1 / 1.9))

# %% Covariance error and TV distance of a sample against the truth
Sigma = np.array([[1.0, 0.5], [0.5, 100.0]])
a = rng.multivariate_normal([0, 1], Sigma, size=10_000)
b = rng.multivariate_normal([0, 1], Sigma, size=10_000)
print("covariance error:", cov_frobenius_error(a, Sigma))
print("TV between two samples of the same law:", discrete_tv(a, b))

# %% W2 between Gaussians
print("W2, pure mean shift:", gaussian_w2([0, 0], np.eye(2), [3, 4], np.eye(2)))
print("W2, scale change:", gaussian_w2([0], [[1.0]], [0], [[4.0]]))
