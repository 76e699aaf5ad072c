"""Sample-quality diagnostics: ESS, covariance error, histogram TV and Gaussian W2."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConstantSeriesError

__all__ = [
    "EssReport",
    "autocorrelation",
    "ess",
    "ess_report",
    "cov_frobenius_error",
    "discrete_tv",
    "gaussian_w2",
]

ESS_CEILING = 2.0


@dataclass(frozen=True)
class EssReport:
    per_dim_ess: list
    mean_ess: float
    min_ess: float
    n: int
    lag_cutoffs: list

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _centered(series):
    x = np.asarray(series, dtype=float).ravel()
    if x.size < 4:
        raise ValueError(f"need at least 4 samples, got {x.size}")
    x = x - x.mean()
    var = np.dot(x, x)
    if not var > 0.0 or not np.isfinite(var):
        raise ConstantSeriesError("series has zero variance")
    return x, var


def _acf(x, var, max_lag):
    n = x.size
    nfft = 1 << int(np.ceil(np.log2(2 * n)))
    f = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[: max_lag + 1]
    rho = acov / var
    rho[0] = 1.0
    return rho


def autocorrelation(series, max_lag: int) -> np.ndarray:
    """Biased sample autocorrelations ``rho(0..max_lag)`` with ``rho(0) = 1``."""
    x, var = _centered(series)
    if not 0 <= max_lag < x.size:
        raise ValueError(f"max_lag must lie in [0, {x.size - 1}]")
    return _acf(x, var, int(max_lag))


def _ess_with_cutoff(series):
    x, var = _centered(series)
    n = x.size
    rho = _acf(x, var, n - 1)
    # Geyer's initial positive sequence: sum pairs (rho_2t + rho_2t+1) until
    # the first nonpositive pair
    npairs = n // 2
    pairs = rho[: 2 * npairs : 2] + rho[1 : 2 * npairs : 2]
    bad = np.nonzero(pairs <= 0.0)[0]
    T = int(bad[0]) if bad.size else npairs
    tau = -1.0 + 2.0 * float(np.sum(pairs[:T]))
    tau = max(tau, 1.0 / ESS_CEILING)
    return n / tau, max(0, 2 * T - 1)


def ess(series) -> float:
    """Effective sample size ``N / (1 + 2 sum_k rho_k)``.

    The lag sum stops before the first adjacent pair ``rho_2t + rho_2t+1``
    that is nonpositive. Antithetic series can exceed N; the result is
    capped at ``2 N``.
    """
    return _ess_with_cutoff(series)[0]


def ess_report(samples) -> EssReport:
    """Per-coordinate ESS of a ``(K, d)`` trace with mean and minimum."""
    s = np.asarray(samples, dtype=float)
    if s.ndim == 1:
        s = s[:, None]
    if s.shape[0] < 4:
        raise ValueError(f"need at least 4 samples, got {s.shape[0]}")
    vals, cuts = zip(*(_ess_with_cutoff(s[:, j]) for j in range(s.shape[1])))
    vals = [float(v) for v in vals]
    return EssReport(
        per_dim_ess=vals,
        mean_ess=float(np.mean(vals)),
        min_ess=float(np.min(vals)),
        n=int(s.shape[0]),
        lag_cutoffs=[int(c) for c in cuts],
    )


def cov_frobenius_error(samples, Sigma) -> float:
    """``|Sigma - cov(samples)|_F`` with the unbiased (n - 1) sample covariance."""
    s = np.asarray(samples, dtype=float)
    if s.ndim == 1:
        s = s[:, None]
    if s.shape[0] < 2:
        raise ValueError("need at least 2 samples")
    S_hat = np.atleast_2d(np.cov(s, rowvar=False, ddof=1))
    return float(np.linalg.norm(np.asarray(Sigma, dtype=float) - S_hat, "fro"))


def discrete_tv(samples_a, samples_b, bins: int = 30) -> float:
    """Histogram total-variation distance, averaged over coordinates.

    Each coordinate uses ``bins`` equal-width bins over the pooled min-max
    range of both sample sets.
    """
    a = np.asarray(samples_a, dtype=float)
    b = np.asarray(samples_b, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"sample counts differ: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[1] != b.shape[1]:
        raise ValueError("sample dimensions differ")
    if bins < 2:
        raise ValueError("need at least 2 bins")
    n = a.shape[0]
    tvs = []
    for j in range(a.shape[1]):
        lo = min(a[:, j].min(), b[:, j].min())
        hi = max(a[:, j].max(), b[:, j].max())
        if hi == lo:
            tvs.append(0.0)
            continue
        ca, _ = np.histogram(a[:, j], bins=bins, range=(lo, hi))
        cb, _ = np.histogram(b[:, j], bins=bins, range=(lo, hi))
        tvs.append(0.5 * np.abs(ca - cb).sum() / n)
    return float(np.mean(tvs))


def _psd_sqrt(S, what):
    S = np.atleast_2d(np.asarray(S, dtype=float))
    if not np.allclose(S, S.T, rtol=1e-10, atol=1e-12):
        raise ValueError(f"{what} is not symmetric")
    w, V = np.linalg.eigh(0.5 * (S + S.T))
    tol = 1e-10 * max(1.0, np.abs(w).max())
    if w.min() < -tol:
        raise ValueError(f"{what} is indefinite (min eigenvalue {w.min():.3g})")
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T


def gaussian_w2(mu1, Sigma1, mu2, Sigma2) -> float:
    """2-Wasserstein distance between ``N(mu1, Sigma1)`` and ``N(mu2, Sigma2)``."""
    mu1 = np.atleast_1d(np.asarray(mu1, dtype=float))
    mu2 = np.atleast_1d(np.asarray(mu2, dtype=float))
    S1 = np.atleast_2d(np.asarray(Sigma1, dtype=float))
    S2 = np.atleast_2d(np.asarray(Sigma2, dtype=float))
    _psd_sqrt(S1, "Sigma1")
    r2 = _psd_sqrt(S2, "Sigma2")
    cross = _psd_sqrt(r2 @ S1 @ r2, "cross term")
    bures = np.trace(S1) + np.trace(S2) - 2.0 * np.trace(cross)
    d2 = float(np.sum((mu1 - mu2) ** 2) + max(bures, 0.0))
    return float(np.sqrt(d2))
