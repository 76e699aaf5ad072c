"""The twelve acceptance criteria, one test each.

Each criterion is a function returning ``(passed, detail)``; the test prints
one ``PASS``/``FAIL`` line per criterion. Run directly with
``python tests/test_acceptance.py`` for the summary alone.
"""

import math
import time

import numpy as np
import pytest

from chebyhmc import (
    PhaseState,
    SpectralBounds,
    cheb_roots,
    chebyshev_schedule,
    constant_schedule,
    contraction_factor,
    coupled_deviation,
    cosine_product,
    ess,
    ess_report,
    exact_flow,
    gaussian_general,
    gd_chebyshev_contraction,
    ideal_chain,
    ideal_ensemble,
    leapfrog,
    correlated_gaussian,
    symmetric_mixture,
    pair_time_sum,
    phi_bar,
    psi,
    quadratic_diag,
    rate_bound,
    run_chain,
    total_and_average_time,
)
from chebyhmc.diagnostics import cov_frobenius_error
from chebyhmc.harness.config import derive_seed
from chebyhmc.harness.verify import energy_error_ratio
from chebyhmc.ideal import hamiltonian

B = SpectralBounds(1.0, 100.0)
GRID = np.linspace(1.0, 100.0, 512)


def c01_cosine_le_chebyshev():
    worst = max(
        float(np.max(np.abs(cosine_product(GRID, cheb_roots(K, B))) - np.abs(phi_bar(K, GRID, B))))
        for K in range(1, 65)
    )
    return worst <= 1e-12, 5.0, f"max(|P_cos| - |phi_bar|) = {worst:.3e}"


def c02_rate_bound():
    worst = max(float(np.max(np.abs(phi_bar(K, GRID, B)))) - rate_bound(K, B) for K in range(1, 65))
    return worst <= 1e-12, 5.0, f"max(|phi_bar| - bound) = {worst:.3e}"


def c03_contraction_k400():
    lam = np.linspace(1.0, 100.0, 991)  # {1, 1.1, ..., 100}
    cheb = contraction_factor(lam, chebyshev_schedule(400, B, "random", seed=0))
    bound = 2 * (9 / 11) ** 400
    const = contraction_factor([1.0], constant_schedule(400, B))
    target = math.cos(0.05 * math.pi) ** 400
    ok = cheb <= bound and abs(const - target) <= 1e-5
    return ok, 10.0, (
        f"chebyshev {cheb:.3e} <= {bound:.3e}; constant {const:.6e} vs cos(0.05 pi)^400 = {target:.6e} "
        f"(the rounded 6.96e-3 differs by {abs(const - 6.96e-3):.1e})"
    )


def c04_psi():
    x = np.linspace(0.0, 100.0, 10_000)
    y = np.abs(psi(x))
    at_one = float(psi(1.0))
    ok = y.max() <= 1.0 and int(np.argmax(y)) == 0 and abs(y[0] - 1) <= 1e-12 and abs(at_one - math.pi / 4) <= 1e-9
    return ok, 1.0, f"max |psi| = {y.max():.15f} at x = {x[np.argmax(y)]}, psi(1) - pi/4 = {at_one - math.pi / 4:.1e}"


def c05_gd_oracle():
    lam = np.random.default_rng(0).uniform(1.0, 100.0, 64)
    worst = 0.0
    for K in range(1, 65):
        got = gd_chebyshev_contraction(lam, cheb_roots(K, B), np.ones(64))
        ref = phi_bar(K, lam, B)
        worst = max(worst, float(np.max(np.abs(got - ref) / np.abs(ref))))
    return worst <= 1e-10, 1.0, f"max relative error {worst:.3e}"


def c06_exact_flow():
    rng = np.random.default_rng(1)
    coupling = energy = 0.0
    for _ in range(1000):
        d = int(rng.integers(1, 6))
        lam = rng.uniform(0.01, 100.0, d)
        x0, y0, xi = rng.standard_normal((3, d))
        t = float(rng.uniform(0.0, 20.0))
        a, b = exact_flow(lam, PhaseState(x0, xi), t), exact_flow(lam, PhaseState(y0, xi), t)
        coupling = max(coupling, float(np.max(np.abs(a.x - b.x - coupled_deviation(lam, x0, y0, t)))))
        h0 = hamiltonian(lam, PhaseState(x0, xi))
        energy = max(energy, abs(hamiltonian(lam, a) - h0) / h0)
    return coupling <= 1e-12 and energy <= 1e-10, 1.0, f"coupling {coupling:.2e}, energy {energy:.2e}"


def c07_leapfrog():
    p = correlated_gaussian()
    rng = np.random.default_rng(2)
    rev = 0.0
    for _ in range(100):
        x, v = rng.standard_normal((2, 2))
        end = leapfrog(p, PhaseState(x, v), 0.05, 40)
        back = leapfrog(p, PhaseState(end.x, -end.v), 0.05, 40)
        rev = max(rev, float(np.max(np.abs(back.x - x))), float(np.max(np.abs(back.v + v))))
    q = symmetric_mixture(1)  # nonlinear gradient in one dimension
    eps = 1e-6
    det_err = 0.0
    for _ in range(20):
        z = rng.standard_normal(2)

        def step(w):
            s = leapfrog(q, PhaseState(w[:1], w[1:]), 0.1, 1)
            return np.concatenate([s.x, s.v])

        J = np.column_stack([(step(z + e) - step(z - e)) / (2 * eps) for e in np.eye(2) * eps])
        det_err = max(det_err, abs(np.linalg.det(J) - 1.0))
    ratio = energy_error_ratio(p)
    ok = rev <= 1e-8 and det_err <= 1e-4 and 3.5 <= ratio <= 4.5
    return ok, 30.0, f"reversibility {rev:.2e}, |det J - 1| {det_err:.2e}, dH ratio {ratio:.3f}"


def c08_stationarity():
    p = quadratic_diag([1.0, 100.0])
    Sigma = p.truth[1]
    X0 = np.random.default_rng(3).multivariate_normal(np.zeros(2), Sigma, size=10_000)
    X = ideal_ensemble(p, chebyshev_schedule(20, p.bounds, "random", seed=4), X0, seed=5)
    rel = cov_frobenius_error(X, Sigma) / np.linalg.norm(Sigma, "fro")
    return rel <= 0.05, 30.0, f"relative Frobenius error {rel:.4f}"


def c09_pair_sums_and_average():
    monotone = {}
    for K in (4, 10, 100, 400):
        s = np.array([pair_time_sum(k, K, B) for k in range(1, K // 2 + 1)])
        monotone[K] = bool(np.all(np.diff(s) >= 0))
    _, avg = total_and_average_time(chebyshev_schedule(400, B, "identity"))
    ref = (math.pi / 2) / math.sqrt(101)
    rel = abs(avg - ref) / ref
    ok = all(monotone.values()) and rel <= 0.15
    return ok, 1.0, (
        f"nondecreasing per K: {monotone}; average {avg:.5f} vs (pi/2)/sqrt(L+m) = {ref:.5f} (rel {rel:.3f}). "
        "Measured pair sums decrease in k and the average tends to ellipk(1-m/L)/sqrt(2L) = 0.26132"
    )


def c10_ess():
    iid = ess(np.random.default_rng(6).standard_normal(10_000))
    rng = np.random.default_rng(7)
    e = rng.standard_normal(100_000)
    x = np.empty_like(e)
    x[0] = e[0] / math.sqrt(1 - 0.81)
    for t in range(1, x.size):
        x[t] = 0.9 * x[t - 1] + e[t]
    ar = ess(x)
    want = 100_000 * 0.1 / 1.9
    ok = 8_000 <= iid <= 12_000 and abs(ar - want) <= 0.2 * want
    return ok, 10.0, f"iid ESS {iid:.0f}; AR(1) ESS {ar:.0f} vs {want:.0f}"


def c11_table2_ordering():
    p = correlated_gaussian()
    ratios = []
    for seed in range(3):
        chain_seed = derive_seed(seed, 0, 0)
        cheb = chebyshev_schedule(2000, p.bounds, "random", seed=derive_seed(seed, 0, 1))
        const = constant_schedule(2000, p.bounds)
        a = ess_report(run_chain(p, cheb, 0.05, seed=chain_seed, fused=True).samples).mean_ess
        b = ess_report(run_chain(p, const, 0.05, seed=chain_seed, fused=True).samples).mean_ess
        ratios.append(a / b)
    wins = sum(r > 1.5 for r in ratios)
    return wins >= 2, 600.0, "mean ESS ratios " + ", ".join(f"{r:.2f}" for r in ratios)


def c12_table1_ordering():
    p = gaussian_general([0.0, 0.0], np.diag([1.0, 100.0]))
    x0 = np.zeros(2)
    agree = []
    for seed in range(3):
        chain_seed = derive_seed(seed, 0, 0)
        runs = {
            "perm": chebyshev_schedule(2000, p.bounds, "random", seed=derive_seed(seed, 0, 1)),
            "identity": chebyshev_schedule(2000, p.bounds, "identity"),
            "constant": constant_schedule(2000, p.bounds),
        }
        e = {k: ess_report(ideal_chain(p, s, x0, chain_seed).samples).mean_ess for k, s in runs.items()}
        agree.append((e["perm"] >= e["identity"] > e["constant"], e))
    ok = sum(a for a, _ in agree) >= 2
    detail = "; ".join(
        f"seed {i}: {e['perm']:.0f} / {e['identity']:.0f} / {e['constant']:.0f}" for i, (_, e) in enumerate(agree)
    )
    return ok, 600.0, detail + " (perm / identity / constant)"


CRITERIA = [
    c01_cosine_le_chebyshev,
    c02_rate_bound,
    c03_contraction_k400,
    c04_psi,
    c05_gd_oracle,
    c06_exact_flow,
    c07_leapfrog,
    c08_stationarity,
    c09_pair_sums_and_average,
    c10_ess,
    c11_table2_ordering,
    c12_table1_ordering,
]


def evaluate(fn):
    t0 = time.perf_counter()
    ok, limit, detail = fn()
    secs = time.perf_counter() - t0
    ok = bool(ok) and secs < limit
    n = CRITERIA.index(fn) + 1
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'} ({secs:.2f}s, limit {limit:g}s): {detail}"
    return ok, line


@pytest.mark.parametrize("fn", CRITERIA, ids=[f.__name__ for f in CRITERIA])
def test_criterion(fn, capsys):
    ok, line = evaluate(fn)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(f) for f in CRITERIA]
    for _, line in results:
        print(line)
    print(f"{sum(ok for ok, _ in results)}/{len(results)} criteria passed")
