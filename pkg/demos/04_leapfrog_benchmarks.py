"""
Leapfrog HMC benchmarks
=======================

With a leapfrog integrator the number of steps per iteration is
floor(eta / theta), and a Metropolis test corrects the discretization error.
This runs one chain per schedule on each of three targets.
"""

import numpy as np

from chebyhmc import (
    chebyshev_schedule,
    constant_schedule,
    ess_report,
    hard_potential,
    correlated_gaussian,
    symmetric_mixture,
    run_chain,
)

targets = [
    ("correlated gaussian", correlated_gaussian(), 0.05),
    ("gaussian mixture", symmetric_mixture(10), 0.01),
    ("hard potential", hard_potential(50.0, 0.01, 10), 0.01),
]

for name, p, theta in targets:
    print(f"\n{name}: m={p.bounds.m:.3g}, L={p.bounds.L:.3g}, theta={theta}")
    for s in (chebyshev_schedule(2000, p.bounds, "random", seed=0), constant_schedule(2000, p.bounds)):
        tr = run_chain(p, s, theta, seed=1, fused=True)
        rep = ess_report(tr.samples)
        print(
            f"  {s.kind:>9}: mean ESS {rep.mean_ess:7.1f}  min ESS {rep.min_ess:6.1f}  "
            f"ESS/grad {rep.mean_ess / tr.n_grad_evals:.2e}  acceptance {tr.acceptance_rate:.3f}"
        )

# %% The same runs are available from the command line, with CSV output:
#   chebyhmc bench --k 2000 --theta 0.05 --repeats 3 --out results/gaussian
