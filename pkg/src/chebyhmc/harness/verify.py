"""Registry of numerical invariant checks run by ``chebyhmc verify``.

Every check is a zero-argument function returning ``(passed, detail)``.
Checks are grouped by the module whose behaviour they pin down; the
``INVARIANTS`` table lists what each module promises and
``harness.registry_complete`` asserts that every promise has a check.
"""

from __future__ import annotations

import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from ..chebyshev import (
    SpectralBounds,
    cheb_first_kind,
    cheb_roots,
    cosine_product,
    gd_chebyshev_contraction,
    phi_bar,
    psi,
    rate_bound,
)
from ..diagnostics import cov_frobenius_error, discrete_tv, ess, gaussian_w2
from ..ideal import PhaseState, contraction_factor, coupled_deviation, exact_flow, hamiltonian, ideal_ensemble
from ..potentials import (
    LabeledDataset,
    gaussian_mixture,
    hard_potential,
    hessian_extreme_eigs,
    logistic_regression,
    correlated_gaussian,
    symmetric_mixture,
    quadratic_diag,
)
from ..sampler import hmc_step, leapfrog, run_ensemble
from ..schedules import chebyshev_schedule, pair_time_sum, total_and_average_time, average_time_limit

FAULTS = ("perturb-root",)

B = SpectralBounds(1.0, 100.0)
K_SWEEP = range(1, 65)
GRID = np.linspace(B.m, B.L, 512)


@dataclass(frozen=True)
class Check:
    module: str
    name: str
    description: str
    fn: Callable[[], tuple[bool, str]]

    @property
    def key(self) -> str:
        return f"{self.module}.{self.name}"


# module -> invariant names; one entry per promised property
INVARIANTS = {
    "chebyshev_core": (
        "cosine_le_chebyshev",
        "chebyshev_rate_bound",
        "psi_bound",
        "product_identity",
        "first_kind_recurrence",
        "gd_oracle",
    ),
    "schedules": ("pair_sum_monotonicity", "permutation_invariance", "average_time"),
    "potentials": (
        "gradient_finite_difference",
        "mixture_convexity_gate",
        "hard_curvature_range",
        "logistic_m_ge_alpha",
    ),
    "ideal_flow": ("energy_conservation", "coupling_identity", "schedule_contraction_bound", "coupled_w2_exact"),
    "hmc_sampler": (
        "leapfrog_reversibility",
        "leapfrog_volume",
        "energy_error_order",
        "reject_copies_previous",
        "stationarity",
    ),
    "diagnostics": ("ess_iid", "tv_symmetry", "w2_triangle", "cov_error_order_invariance"),
    "harness": ("reproducible_outputs", "registry_complete"),
}

REGISTRY: dict[str, Check] = {}
_fault: str | None = None


def check(module: str, description: str):
    def wrap(fn):
        c = Check(module, fn.__name__, description, fn)
        REGISTRY[c.key] = c
        return fn

    return wrap


def _ok(cond, detail: str):
    return bool(cond), detail


# chebyshev_core

def _roots_for_check(K):
    r = np.array(cheb_roots(K, B).roots)
    if _fault == "perturb-root":
        r[K // 2] *= 1.01
    return r


@check("chebyshev_core", "|cosine product| <= |phi_bar_K| + 1e-12 for K = 1..64 on a 512-point grid")
def cosine_le_chebyshev():
    worst, at = -np.inf, None
    for K in K_SWEEP:
        gap = np.abs(cosine_product(GRID, _roots_for_check(K))) - np.abs(phi_bar(K, GRID, B))
        j = int(np.argmax(gap))
        if gap[j] > worst:
            worst, at = gap[j], (K, GRID[j])
    return _ok(worst <= 1e-12, f"max excess {worst:.3e} at K={at[0]}, lam={at[1]:.3f}")


@check("chebyshev_core", "max |phi_bar_K| over the grid <= rate bound + 1e-12")
def chebyshev_rate_bound():
    excess = max(np.max(np.abs(phi_bar(K, GRID, B))) - rate_bound(K, B) for K in K_SWEEP)
    return _ok(excess <= 1e-12, f"max excess {excess:.3e}")


@check("chebyshev_core", "|psi| <= 1 on [0, 100], equality only at x = 0")
def psi_bound():
    x = np.linspace(0.0, 100.0, 10_000)
    y = np.abs(psi(x))
    rest = y[1:].max()
    ok = abs(y[0] - 1.0) <= 1e-12 and rest < 1.0 and abs(float(psi(1.0)) - np.pi / 4) <= 1e-9
    return _ok(ok, f"psi(0)={y[0]:.15f}, max elsewhere {rest:.6f}")


@check("chebyshev_core", "phi_bar equals prod(1 - lam/r_k) for K <= 64")
def product_identity():
    # The float product loses relative accuracy near the roots; compare with
    # an error floor of 1e-9 * |phi_bar|'s normalisation 1/T_K(h(0)).
    worst = 0.0
    for K in K_SWEEP:
        r = cheb_roots(K, B).roots
        prod = np.prod(1.0 - GRID[:, None] / r, axis=1)
        val = phi_bar(K, GRID, B)
        floor = 1.0 / float(cheb_first_kind(K, (B.L + B.m) / (B.L - B.m)))
        worst = max(worst, np.max(np.abs(val - prod) / np.maximum(np.abs(prod), floor)))
    return _ok(worst <= 1e-9, f"max scaled relative error {worst:.3e}")


@check("chebyshev_core", "T_K matches the three-term recurrence on |x| <= 10")
def first_kind_recurrence():
    x = np.linspace(-10.0, 10.0, 2001)
    t_prev, t = np.ones_like(x), x.copy()
    worst = 0.0
    for K in range(1, 65):
        if K > 1:
            t_prev, t = t, 2.0 * x * t - t_prev
        err = np.abs(cheb_first_kind(K, x) - t) / np.maximum(np.abs(t), 1.0)
        worst = max(worst, err.max())
    return _ok(worst <= 1e-10, f"max relative error {worst:.3e}")


@check("chebyshev_core", "gradient descent with steps 1/r_k contracts coordinate j by phi_bar(lam_j)")
def gd_oracle():
    rng = np.random.default_rng(11)
    lam = rng.uniform(B.m, B.L, 64)
    worst = 0.0
    for K in K_SWEEP:
        w = gd_chebyshev_contraction(lam, cheb_roots(K, B), np.ones(64))
        ref = phi_bar(K, lam, B)
        floor = 1.0 / float(cheb_first_kind(K, (B.L + B.m) / (B.L - B.m)))
        worst = max(worst, np.max(np.abs(w - ref) / np.maximum(np.abs(ref), floor)))
    return _ok(worst <= 1e-10, f"max scaled relative error {worst:.3e}")


# schedules

@check("schedules", "pair sums 1/sqrt(r_k) + 1/sqrt(r_{K+1-k}) are monotone in k")
def pair_sum_monotonicity():
    # Measured direction: the sums decrease in k (see the ledger); the check
    # pins the sign so a regression in either direction is caught.
    details = []
    ok = True
    for K in (4, 10, 100, 400):
        s = np.array([pair_time_sum(k, K, B) for k in range(1, K // 2 + 1)])
        d = np.diff(s)
        ok &= bool(np.all(d <= 1e-12))
        details.append(f"K={K}: {s[0]:.4f}->{s[-1]:.4f}")
    return _ok(ok, "nonincreasing; " + ", ".join(details))


@check("schedules", "cosine product does not depend on the execution order")
def permutation_invariance():
    rng = np.random.default_rng(5)
    worst = 0.0
    for K in (7, 33, 64):
        roots = cheb_roots(K, B)
        base = cosine_product(GRID, roots)
        for _ in range(5):
            other = cosine_product(GRID, roots, order=rng.permutation(K))
            worst = max(worst, np.max(np.abs(other - base)))
        a = contraction_factor(GRID, chebyshev_schedule(K, B, "random", seed=1))
        b = contraction_factor(GRID, chebyshev_schedule(K, B, "identity"))
        worst = max(worst, abs(a - b) / max(b, 1e-300))
    return _ok(worst <= 1e-12, f"max difference {worst:.3e}")


@check("schedules", "mean Chebyshev time at K = 400 is close to its large-K limit")
def average_time():
    _, avg = total_and_average_time(chebyshev_schedule(400, B, "identity"))
    limit = average_time_limit(B)
    rel = abs(avg - limit) / limit
    return _ok(rel <= 0.01, f"mean {avg:.5f}, limit ellipk(1-m/L)/sqrt(2L) = {limit:.5f}, rel {rel:.2e}")


# potentials

def _toy_logistic():
    rng = np.random.default_rng(3)
    z = rng.standard_normal((60, 3))
    y = np.where(z @ np.array([1.0, -0.5, 0.25]) + 0.3 * rng.standard_normal(60) > 0, 1.0, -1.0)
    return logistic_regression(LabeledDataset(z, y), alpha=1.0)


def _five_potentials():
    return [
        quadratic_diag([1.0, 3.0, 100.0]),
        correlated_gaussian(),
        symmetric_mixture(),
        _toy_logistic(),
        hard_potential(50.0, 0.05, 10),
    ]


@check("potentials", "central differences of f match the gradient on all five potentials")
def gradient_finite_difference():
    rng = np.random.default_rng(17)
    eps = 1e-6
    worst = 0.0
    for p in _five_potentials():
        for _ in range(5):
            x = rng.standard_normal(p.dim)
            g = p.gradient(x)
            E = np.eye(p.dim) * eps
            fd = np.array([(p.value(x + e) - p.value(x - e)) / (2 * eps) for e in E])
            worst = max(worst, np.max(np.abs(fd - g)) / max(1.0, np.max(np.abs(g))))
    return _ok(worst <= 1e-6, f"max relative error {worst:.3e}")


@check("potentials", "mixture constructor rejects a^T Sigma^-1 a >= 1")
def mixture_convexity_gate():
    d = 4
    Sigma = np.diag([1.0, 2.0, 3.0, 4.0])
    a = np.zeros(d)
    a[0] = 1.0  # a^T Sigma^-1 a = 1
    try:
        gaussian_mixture(a, Sigma)
    except ValueError:
        pass
    else:
        return False, "boundary case accepted"
    gaussian_mixture(0.9 * a, Sigma)
    return True, "rejects =1, accepts 0.81"


@check("potentials", "hard potential curvature lies in [kappa/3, kappa], first coordinate exactly 1")
def hard_curvature_range():
    kappa, h = 50.0, 0.01
    p = hard_potential(kappa, h, 2)
    xs = np.linspace(-3.0, 3.0, 4001)
    eps = 1e-6
    X = np.stack([xs, xs], axis=1)
    d2 = (p.gradient(X + eps) - p.gradient(X - eps)) / (2 * eps)
    lo, hi = d2[:, 1].min(), d2[:, 1].max()
    first = np.max(np.abs(d2[:, 0] - 1.0))
    ok = lo >= kappa / 3 - 1e-4 and hi <= kappa + 1e-4 and first <= 1e-6
    return _ok(ok, f"second derivative range [{lo:.4f}, {hi:.4f}], first coordinate err {first:.1e}")


@check("potentials", "logistic Hessian minimum eigenvalue >= alpha everywhere")
def logistic_m_ge_alpha():
    p = _toy_logistic()
    rng = np.random.default_rng(23)
    pts = [np.asarray(p.params["mode"])] + [3.0 * rng.standard_normal(p.dim) for _ in range(50)]
    m_min = min(hessian_extreme_eigs(p, w).m for w in pts)
    return _ok(m_min >= p.params["alpha"] - 1e-10 and p.bounds.m >= p.params["alpha"] - 1e-10,
               f"smallest eigenvalue {m_min:.6f} (alpha = {p.params['alpha']})")


# ideal_flow

@check("ideal_flow", "exact flow conserves H to 1e-10 relative")
def energy_conservation():
    rng = np.random.default_rng(29)
    worst = 0.0
    for _ in range(1000):
        d = int(rng.integers(1, 6))
        lam = rng.uniform(0.01, 100.0, d)
        s0 = PhaseState(rng.standard_normal(d), rng.standard_normal(d))
        s1 = exact_flow(lam, s0, float(rng.uniform(0.0, 20.0)))
        h0, h1 = hamiltonian(lam, s0), hamiltonian(lam, s1)
        worst = max(worst, abs(h1 - h0) / h0)
    return _ok(worst <= 1e-10, f"max relative drift {worst:.3e}")


@check("ideal_flow", "shared-velocity flows differ by cos(sqrt(2 lam) t)(x0 - y0)")
def coupling_identity():
    rng = np.random.default_rng(31)
    worst = 0.0
    for _ in range(1000):
        d = int(rng.integers(1, 6))
        lam = rng.uniform(0.01, 100.0, d)
        x0, y0, xi = rng.standard_normal((3, d))
        t = float(rng.uniform(0.0, 20.0))
        gap = exact_flow(lam, PhaseState(x0, xi), t).x - exact_flow(lam, PhaseState(y0, xi), t).x
        worst = max(worst, np.max(np.abs(gap - coupled_deviation(lam, x0, y0, t))))
    return _ok(worst <= 1e-12, f"max abs error {worst:.3e}")


@check("ideal_flow", "Chebyshev contraction factor <= rate bound for K = 1..64")
def schedule_contraction_bound():
    excess = max(
        contraction_factor(GRID, chebyshev_schedule(K, B, "random", seed=K)) - rate_bound(K, B) for K in K_SWEEP
    )
    return _ok(excess <= 1e-12, f"max excess {excess:.3e}")


@check("ideal_flow", "coupled chains contract by exactly the contraction factor")
def coupled_w2_exact():
    lam = np.array([1.0, 2.5, 17.0, 64.0, 100.0])
    s = chebyshev_schedule(16, B, "random", seed=2)
    p = quadratic_diag(lam)
    rng = np.random.default_rng(37)
    n = 200
    X0 = rng.standard_normal((n, lam.size))
    gap0 = np.zeros(lam.size)
    gap0[int(np.argmax(np.abs(np.prod(np.cos(np.outer(s.times, np.sqrt(2 * lam))), axis=0))))] = 1.0
    Y0 = X0 + gap0
    X = ideal_ensemble(p, s, X0, seed=41)
    Y = ideal_ensemble(p, s, Y0, seed=41)
    rms = float(np.sqrt(np.mean(np.sum((Y - X) ** 2, axis=1))))
    target = contraction_factor(lam, s) * 1.0
    return _ok(abs(rms - target) <= 1e-10, f"rms gap {rms:.12e} vs factor {target:.12e}")


# hmc_sampler

@check("hmc_sampler", "leapfrog forward, flip, forward returns to the start (1e-8)")
def leapfrog_reversibility():
    rng = np.random.default_rng(43)
    worst = 0.0
    for p in _five_potentials():
        theta = 0.5 / np.sqrt(p.bounds.L)
        for _ in range(100):
            x, v = rng.standard_normal((2, p.dim))
            S = int(rng.integers(1, 30))
            end = leapfrog(p, PhaseState(x, v), theta, S)
            back = leapfrog(p, PhaseState(end.x, -end.v), theta, S)
            scale = max(1.0, np.max(np.abs(end.x)), np.max(np.abs(end.v)))
            worst = max(worst, np.max(np.abs(back.x - x)) / scale, np.max(np.abs(back.v + v)) / scale)
    return _ok(worst <= 1e-8, f"max error {worst:.3e}")


@check("hmc_sampler", "one leapfrog map has unit Jacobian determinant (d = 1)")
def leapfrog_volume():
    p = hard_potential(50.0, 0.05, 2)
    rng = np.random.default_rng(47)
    eps = 1e-6
    worst = 0.0

    def step(z):
        # coordinate 2 of the hard potential is nonlinear; pin coordinate 1 at 0
        s = leapfrog(p, PhaseState(np.array([0.0, z[0]]), np.array([0.0, z[1]])), 0.02, 5)
        return np.array([s.x[1], s.v[1]])

    for _ in range(20):
        z = rng.standard_normal(2)
        J = np.column_stack([(step(z + e) - step(z - e)) / (2 * eps) for e in np.eye(2) * eps])
        worst = max(worst, abs(np.linalg.det(J) - 1.0))
    return _ok(worst <= 1e-4, f"max |det - 1| {worst:.3e}")


def energy_error_ratio(p=None, n: int = 200, T: float = 2.0, theta: float = 0.05, seed: int = 53) -> float:
    """median |dH| at step theta divided by median |dH| at theta / 2 (fixed time T)."""
    p = p or correlated_gaussian()
    rng = np.random.default_rng(seed)
    mu, Sigma = p.truth
    xs = rng.multivariate_normal(mu, Sigma, size=n)
    vs = rng.standard_normal((n, p.dim))

    def med(th):
        S = int(round(T / th))
        end = leapfrog(p, PhaseState(xs, vs), th, S)
        dh = p.value(end.x) + 0.5 * np.sum(end.v**2, 1) - p.value(xs) - 0.5 * np.sum(vs**2, 1)
        return np.median(np.abs(dh))

    return float(med(theta) / med(theta / 2))


@check("hmc_sampler", "median |dH| shrinks by ~4 when theta halves")
def energy_error_order():
    r = energy_error_ratio()
    return _ok(3.5 <= r <= 4.5, f"ratio {r:.4f}")


@check("hmc_sampler", "rejected proposals copy the previous position bit for bit")
def reject_copies_previous():
    p = symmetric_mixture()
    rng = np.random.default_rng(59)
    for _ in range(50):
        x = rng.standard_normal(p.dim)
        x_next, accepted, _ = hmc_step(p, x, 0.5, 0.05, rng, zeta=1.0)
        if accepted or x_next.tobytes() != x.tobytes():
            return False, "rejected state differs from previous"
    return True, "50/50 rejections identical"


def stationarity_errors(n: int = 10_000, K: int = 50, theta: float = 0.05, seed: int = 61):
    """Relative mean and covariance error after K HMC steps started at the target."""
    p = correlated_gaussian()
    mu, Sigma = p.truth
    X0 = np.random.default_rng(seed).multivariate_normal(mu, Sigma, size=n)
    s = chebyshev_schedule(K, p.bounds, "random", seed=seed)
    X, acc = run_ensemble(p, s, theta, X0, seed=seed)
    mean_err = np.linalg.norm(X.mean(0) - mu) / np.sqrt(np.trace(Sigma))
    cov_err = cov_frobenius_error(X, Sigma) / np.linalg.norm(Sigma, "fro")
    return float(mean_err), float(cov_err), float(acc.mean())


@check("hmc_sampler", "chains started at the target stay there (mean, covariance within 5%)")
def stationarity():
    m, c, a = stationarity_errors()
    return _ok(m <= 0.05 and c <= 0.05, f"mean err {m:.4f}, cov err {c:.4f}, acceptance {a:.3f}")


# diagnostics

@check("diagnostics", "ESS of i.i.d. draws lies in [0.8 N, 1.2 N] for 3 seeds")
def ess_iid():
    vals = [ess(np.random.default_rng(s).standard_normal(10_000)) for s in (0, 1, 2)]
    return _ok(all(8_000 <= v <= 12_000 for v in vals), "ESS " + ", ".join(f"{v:.0f}" for v in vals))


@check("diagnostics", "histogram TV is symmetric and in [0, 1]")
def tv_symmetry():
    rng = np.random.default_rng(67)
    for _ in range(20):
        a = rng.standard_normal((500, 3))
        b = rng.standard_normal((500, 3)) * rng.uniform(0.5, 2.0) + rng.uniform(-1, 1)
        t1, t2 = discrete_tv(a, b), discrete_tv(b, a)
        if t1 != t2 or not 0.0 <= t1 <= 1.0:
            return False, f"tv(a,b)={t1}, tv(b,a)={t2}"
    return True, "20 pairs symmetric and bounded"


@check("diagnostics", "Gaussian W2 satisfies the triangle inequality")
def w2_triangle():
    rng = np.random.default_rng(71)
    worst = -np.inf
    for _ in range(100):
        d = int(rng.integers(1, 5))
        gs = []
        for _ in range(3):
            A = rng.standard_normal((d, d))
            gs.append((rng.standard_normal(d), A @ A.T + 0.01 * np.eye(d)))
        ab = gaussian_w2(*gs[0], *gs[1])
        bc = gaussian_w2(*gs[1], *gs[2])
        ac = gaussian_w2(*gs[0], *gs[2])
        worst = max(worst, ac - ab - bc)
    return _ok(worst <= 1e-8, f"max violation {worst:.3e}")


@check("diagnostics", "covariance error does not depend on sample order")
def cov_error_order_invariance():
    rng = np.random.default_rng(73)
    s = rng.standard_normal((1000, 4))
    Sigma = np.eye(4)
    a = cov_frobenius_error(s, Sigma)
    b = cov_frobenius_error(s[rng.permutation(1000)], Sigma)
    return _ok(abs(a - b) <= 1e-12 * max(a, 1.0), f"{a:.15f} vs {b:.15f}")


# harness

@check("harness", "identical configs give byte-identical CSVs, each with a provenance sidecar")
def reproducible_outputs():
    from .experiments import figure1

    with tempfile.TemporaryDirectory() as d1, tempfile.TemporaryDirectory() as d2:
        figure1(d1, K=40, step=1.0, psi_points=200, seed=3)
        figure1(d2, K=40, step=1.0, psi_points=200, seed=3)
        csvs = sorted(Path(d1).glob("*.csv"))
        same = all((Path(d2) / f.name).read_bytes() == f.read_bytes() for f in csvs)
        sidecars = all(f.with_name(f.name + ".provenance.json").exists() for f in csvs)
    return _ok(csvs and same and sidecars, f"{len(csvs)} CSVs identical={same}, sidecars={sidecars}")


@check("harness", "every listed invariant has a registered check")
def registry_complete():
    expected = {f"{m}.{n}" for m, names in INVARIANTS.items() for n in names}
    missing = sorted(expected - set(REGISTRY))
    extra = sorted(set(REGISTRY) - expected)
    return _ok(not missing and not extra, f"{len(expected)} invariants; missing={missing}, extra={extra}")


def run_checks(fault: str | None = None, only=None):
    """Run the registry; returns a list of ``(key, passed, detail, seconds)``."""
    global _fault
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}; choose from {FAULTS}")
    _fault = fault
    results = []
    try:
        for key, c in REGISTRY.items():
            if only is not None and key not in only:
                continue
            t0 = time.perf_counter()
            try:
                passed, detail = c.fn()
            except Exception as exc:  # a crashing check is a failing check
                passed, detail = False, f"{type(exc).__name__}: {exc}"
            results.append((key, bool(passed), detail, time.perf_counter() - t0))
    finally:
        _fault = None
    return results


def report(results, stream=None) -> int:
    """Print the pass/fail table; return the process exit status."""
    stream = stream or sys.stdout
    width = max(len(k) for k, *_ in results)
    for key, passed, detail, secs in results:
        print(f"{'PASS' if passed else 'FAIL'}  {key:<{width}}  {secs:6.2f}s  {detail}", file=stream)
    n_fail = sum(not r[1] for r in results)
    print(f"{len(results) - n_fail}/{len(results)} checks passed", file=stream)
    return 1 if n_fail else 0
