"""
Ideal HMC on a Gaussian
=======================

With a quadratic potential the Hamiltonian flow has a closed form, so HMC can
be run without discretization error. Here we compare the three schedules on
a Gaussian with covariance diag(1, 100).
"""

import numpy as np

from chebyhmc import (
    chebyshev_schedule,
    constant_schedule,
    cov_frobenius_error,
    ess_report,
    gaussian_general,
    ideal_chain,
    ideal_ensemble,
)

p = gaussian_general([0.0, 0.0], np.diag([1.0, 100.0]))
print("spectral bounds of the potential:", p.bounds)

K = 2000
schedules = {
    "chebyshev, shuffled": chebyshev_schedule(K, p.bounds, "random", seed=7),
    "chebyshev, sorted": chebyshev_schedule(K, p.bounds, "identity"),
    "constant": constant_schedule(K, p.bounds),
}

# %% Single long chains: effective sample size per coordinate
for name, s in schedules.items():
    rep = ess_report(ideal_chain(p, s, np.zeros(2), seed=0).samples)
    print(f"{name:>20}: mean ESS {rep.mean_ess:7.1f}  min ESS {rep.min_ess:7.1f}")

# %% Many short chains: how fast the ensemble covariance approaches the truth
Sigma = p.truth[1]
X0 = np.zeros((5000, 2))
for name, s in schedules.items():
    errs = []
    ideal_ensemble(p, s, X0, seed=1, on_step=lambda k, X: errs.append(cov_frobenius_error(X, Sigma)) if k <= 50 else None)
    print(f"{name:>20}: covariance error after 10, 50 steps: {errs[9]:.2f}, {errs[49]:.2f}")
