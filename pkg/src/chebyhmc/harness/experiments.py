"""Figure and table generators behind the ``figure1``, ``ideal`` and ``bench`` commands."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from ..chebyshev import SpectralBounds, psi
from ..diagnostics import cov_frobenius_error, discrete_tv, ess_report
from ..ideal import contraction_curve, ideal_chain, ideal_ensemble
from ..sampler import run_chain
from ..schedules import chebyshev_schedule, constant_schedule
from .config import RunConfig, derive_seed
from .io import dump_json, provenance, write_csv

log = logging.getLogger(__name__)

# ideal-HMC variants: (label, schedule kind, permutation mode)
IDEAL_VARIANTS = (
    ("chebyshev_perm", "chebyshev", "random"),
    ("chebyshev_identity", "chebyshev", "identity"),
    ("constant", "constant", "identity"),
)


def _mean_std(values):
    a = np.asarray(values, dtype=float)
    return float(a.mean()), float(a.std(ddof=1)) if a.size > 1 else 0.0


def figure1(
    out,
    K: int = 400,
    m: float = 1.0,
    L: float = 100.0,
    step: float = 0.1,
    perm: str = "random",
    seed: int = 0,
    psi_max: float = 100.0,
    psi_points: int = 10_000,
):
    """Write the cosine-product curves and the psi curve as CSV.

    ``figure1_contraction.csv`` has one row per k = 0..K with the running
    max over the grid ``{m, m + step, ..., L}`` for both schedules;
    ``figure1_psi.csv`` samples psi on ``[0, psi_max]``.
    """
    b = SpectralBounds(m, L)
    n = int(round((L - m) / step)) + 1
    grid = np.linspace(m, L, n)
    cheb = chebyshev_schedule(K, b, perm, seed=seed if perm == "random" else None)
    const = constant_schedule(K, b)
    c_cheb = contraction_curve(grid, cheb)
    c_const = contraction_curve(grid, const)
    config = dict(K=K, m=m, L=L, step=step, perm=perm, seed=seed, psi_max=psi_max, psi_points=psi_points)
    prov = provenance("figure1", config, seeds={"permutation": cheb.seed})
    out = Path(out)
    left = write_csv(
        out / "figure1_contraction.csv",
        ["k", "chebyshev", "constant"],
        ([k, c_cheb[k], c_const[k]] for k in range(K + 1)),
        prov,
    )
    x = np.linspace(0.0, psi_max, psi_points)
    right = write_csv(out / "figure1_psi.csv", ["x", "psi"], zip(x, psi(x)), prov)
    return {"contraction": left, "psi": right, "chebyshev": c_cheb, "constant": c_const}


def _ideal_schedule(cfg: RunConfig, bounds, kind: str, perm: str, repeat: int):
    if kind == "constant":
        return constant_schedule(cfg.K, bounds)
    seed = derive_seed(cfg.seed, repeat, 1) if perm == "random" else None
    return chebyshev_schedule(cfg.K, bounds, perm, seed=seed)


def ideal(cfg: RunConfig):
    """Ideal-HMC comparison of permuted / unpermuted Chebyshev and constant times.

    Writes ``ideal_ess_runs.csv`` and ``ideal_ess.csv`` (mean and min ESS per
    variant, mean and std over repeats) and, when ``cov_error`` or ``tv`` is
    among the metrics, ``ideal_series.csv`` with one row per iteration
    computed over an ensemble of ``cfg.chains`` chains.
    """
    cfg.validate(leapfrog=False)
    p = cfg.build_potential(cfg.thetas[0])
    if p.quadratic_form is None and p.exact_flow_eigenvalues is None:
        raise ValueError(f"ideal HMC needs a quadratic potential, got {p.name!r}")
    x0 = np.zeros(p.dim) if cfg.x0 is None else np.asarray(cfg.x0, dtype=float)
    out = Path(cfg.out)
    seeds = {}
    runs = []
    for r in range(cfg.repeats):
        chain_seed = derive_seed(cfg.seed, r, 0)
        seeds[f"repeat{r}"] = chain_seed
        for label, kind, perm in IDEAL_VARIANTS:
            s = _ideal_schedule(cfg, p.bounds, kind, perm, r)
            rep = ess_report(ideal_chain(p, s, x0, chain_seed).samples)
            runs.append([label, r, rep.mean_ess, rep.min_ess])
    prov = provenance("ideal", cfg.to_dict(), seeds=seeds)
    write_csv(out / "ideal_ess_runs.csv", ["method", "repeat", "mean_ess", "min_ess"], runs, prov)
    table = []
    for label, _, _ in IDEAL_VARIANTS:
        rows = [r for r in runs if r[0] == label]
        table.append([label, *_mean_std([r[2] for r in rows]), *_mean_std([r[3] for r in rows])])
    write_csv(
        out / "ideal_ess.csv",
        ["method", "mean_ess", "mean_ess_std", "min_ess", "min_ess_std"],
        table,
        prov,
    )
    result = {"runs": runs, "table": table}

    want = [m for m in ("cov_error", "tv") if m in cfg.metrics]
    if want and p.truth is not None:
        n = cfg.chains or 10_000
        mu, Sigma = p.truth
        ref = np.random.default_rng(derive_seed(cfg.seed, 0, 2)).multivariate_normal(mu, Sigma, size=n)
        series = []
        X0 = np.tile(x0, (n, 1))
        for label, kind, perm in IDEAL_VARIANTS:
            s = _ideal_schedule(cfg, p.bounds, kind, perm, 0)

            def record(k, X, label=label):
                row = [k, label]
                row.append(cov_frobenius_error(X, Sigma) if "cov_error" in want else "")
                row.append(discrete_tv(X, ref, bins=30) if "tv" in want else "")
                series.append(row)

            ideal_ensemble(p, s, X0, derive_seed(cfg.seed, 0, 3), on_step=record)
        write_csv(out / "ideal_series.csv", ["k", "method", "cov_error", "tv"], series, prov)
        result["series"] = series
    return result


def _bench_task(cfg_dict: dict, kind: str, theta: float, repeat: int) -> dict:
    cfg = RunConfig.from_dict(cfg_dict)
    p = cfg.build_potential(theta)
    s = cfg.build_schedule(kind, p.bounds, derive_seed(cfg.seed, repeat, 1))
    x0 = None if cfg.x0 is None else np.asarray(cfg.x0, dtype=float)
    t0 = time.perf_counter()
    tr = run_chain(p, s, theta, x0=x0, seed=derive_seed(cfg.seed, repeat, 0), fused=cfg.fused)
    rep = ess_report(tr.samples)
    wall = time.perf_counter() - t0
    return {
        "schedule": kind,
        "theta": float(theta),
        "repeat": repeat,
        "mean_ess": rep.mean_ess,
        "min_ess": rep.min_ess,
        "acceptance": tr.acceptance_rate,
        "n_grad_evals": tr.n_grad_evals,
        "wall_time": wall,
        "bounds": [p.bounds.m, p.bounds.L],
    }


def bench(cfg: RunConfig):
    """Leapfrog HMC benchmark in the layout of the ESS tables.

    One chain per (schedule, theta, repeat). ``bench.csv`` holds mean/std
    over repeats of Mean ESS, Min ESS, their per-gradient-evaluation rates
    and the acceptance probability; ``bench_timing.csv`` holds the
    per-second rates, which depend on the machine. ``bench_summary.json``
    collects both.
    """
    cfg.validate()
    tasks = [(k, t, r) for k in cfg.schedules for t in cfg.thetas for r in range(cfg.repeats)]
    payload = cfg.to_dict()
    workers = min(cfg.n_workers(), len(tasks))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_bench_task, *zip(*[(payload, *t) for t in tasks])))
    else:
        results = [_bench_task(payload, *t) for t in tasks]
    results.sort(key=lambda d: (cfg.schedules.index(d["schedule"]), cfg.thetas.index(d["theta"]), d["repeat"]))

    seeds = {f"repeat{r}": {"chain": derive_seed(cfg.seed, r, 0), "permutation": derive_seed(cfg.seed, r, 1)}
             for r in range(cfg.repeats)}
    inputs = [cfg.potential_params["csv"]] if "csv" in cfg.potential_params else []
    prov = provenance("bench", payload, seeds=seeds, inputs=inputs)
    out = Path(cfg.out)
    write_csv(
        out / "bench_runs.csv",
        ["schedule", "theta", "repeat", "mean_ess", "min_ess", "acceptance", "n_grad_evals"],
        ([d["schedule"], d["theta"], d["repeat"], d["mean_ess"], d["min_ess"], d["acceptance"], d["n_grad_evals"]]
         for d in results),
        prov,
    )
    table, timing, summary = [], [], []
    for kind in cfg.schedules:
        for theta in cfg.thetas:
            cell = [d for d in results if d["schedule"] == kind and d["theta"] == theta]
            grads = np.array([d["n_grad_evals"] for d in cell], dtype=float)
            wall = np.array([d["wall_time"] for d in cell])
            mean_ess = np.array([d["mean_ess"] for d in cell])
            min_ess = np.array([d["min_ess"] for d in cell])
            acc = [d["acceptance"] for d in cell]
            stats = {
                "mean_ess": _mean_std(mean_ess),
                "min_ess": _mean_std(min_ess),
                "mean_ess_per_grad": _mean_std(mean_ess / grads),
                "min_ess_per_grad": _mean_std(min_ess / grads),
                "acc_prob": _mean_std(acc),
            }
            table.append([kind, theta, *[v for pair in stats.values() for v in pair]])
            tstats = {"mean_ess_per_sec": _mean_std(mean_ess / wall), "min_ess_per_sec": _mean_std(min_ess / wall)}
            timing.append([kind, theta, *[v for pair in tstats.values() for v in pair]])
            summary.append({"schedule": kind, "theta": theta, **stats, **tstats,
                            "wall_time_total": float(wall.sum()), "bounds": cell[0]["bounds"]})
    cols = ["mean_ess", "min_ess", "mean_ess_per_grad", "min_ess_per_grad", "acc_prob"]
    write_csv(out / "bench.csv", ["schedule", "theta", *[c + s for c in cols for s in ("", "_std")]], table, prov)
    write_csv(
        out / "bench_timing.csv",
        ["schedule", "theta", "mean_ess_per_sec", "mean_ess_per_sec_std", "min_ess_per_sec", "min_ess_per_sec_std"],
        timing,
        prov,
    )
    dump_json(out / "bench_summary.json", {"cells": summary, "provenance": prov})
    return {"runs": results, "cells": summary}
