"""Target potentials ``f`` for densities ``pi(x) ~ exp(-f(x))``.

Every potential evaluates on arrays of shape ``(..., d)`` so a whole ensemble
of chains can be advanced with one call.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.special import expit

from .chebyshev import SpectralBounds
from .errors import ConvergenceError

__all__ = [
    "PotentialSpec",
    "LabeledDataset",
    "quadratic_diag",
    "gaussian_general",
    "correlated_gaussian",
    "gaussian_mixture",
    "symmetric_mixture",
    "logistic_regression",
    "load_labeled_csv",
    "hard_potential",
    "newton_map",
    "hessian_extreme_eigs",
    "make_potential",
]


@dataclass(frozen=True)
class PotentialSpec:
    """A potential with its gradient, Hessian and spectral estimates.

    ``quadratic_form`` is ``(center, hessian)`` when ``f`` is exactly
    quadratic; ideal HMC needs it. ``exact_flow_eigenvalues`` is set only for
    separable potentials ``sum(lam_j x_j**2)``.
    """

    name: str
    dim: int
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    bounds: SpectralBounds
    hessian: Callable[[np.ndarray], np.ndarray] | None = None
    exact_flow_eigenvalues: np.ndarray | None = None
    truth: tuple[np.ndarray, np.ndarray] | None = None
    quadratic_form: tuple[np.ndarray, np.ndarray] | None = None
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        z = np.atleast_2d(np.asarray(self.features, dtype=float))
        y = np.asarray(self.labels, dtype=float).ravel()
        if z.shape[0] != y.shape[0]:
            raise ValueError(f"{z.shape[0]} feature rows but {y.shape[0]} labels")
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise ValueError("labels must be -1 or +1")
        if not np.all(np.isfinite(z)):
            raise ValueError("features contain non-finite entries")
        object.__setattr__(self, "features", z)
        object.__setattr__(self, "labels", y)

    @property
    def n(self) -> int:
        return self.features.shape[0]


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_spd(S, what):
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"{what} must be a square matrix")
    if not np.allclose(S, S.T, rtol=1e-12, atol=1e-12):
        raise ValueError(f"{what} must be symmetric")
    try:
        np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        raise ValueError(f"{what} must be positive definite") from None
    return S


def quadratic_diag(lam) -> PotentialSpec:
    """``f(x) = sum_j lam_j x_j**2``; ground truth covariance ``diag(1 / (2 lam))``."""
    lam = _readonly(np.ravel(lam))
    if lam.size == 0 or np.any(~(lam > 0.0)) or np.any(~np.isfinite(lam)):
        raise ValueError("eigenvalues must be positive and finite")
    d = lam.size

    def value(x):
        return np.sum(lam * np.asarray(x) ** 2, axis=-1)

    def gradient(x):
        return 2.0 * lam * np.asarray(x)

    def hessian(x):
        return np.diag(2.0 * lam)

    return PotentialSpec(
        name="quadratic",
        dim=d,
        value=value,
        gradient=gradient,
        hessian=hessian,
        bounds=SpectralBounds(lam.min(), lam.max()),
        exact_flow_eigenvalues=lam,
        truth=(np.zeros(d), np.diag(0.5 / lam)),
        quadratic_form=(np.zeros(d), np.diag(2.0 * lam)),
        params={"eigenvalues": lam.tolist()},
    )


def gaussian_general(mu, Sigma) -> PotentialSpec:
    """``f(x) = (x - mu)^T Sigma^{-1} (x - mu) / 2``; bounds from ``eig(Sigma^{-1})``."""
    mu = _readonly(np.ravel(mu))
    Sigma = _check_spd(Sigma, "Sigma")
    if Sigma.shape[0] != mu.size:
        raise ValueError("mu and Sigma dimensions differ")
    P = np.linalg.inv(Sigma)
    P = _readonly(0.5 * (P + P.T))
    ev = np.linalg.eigvalsh(P)

    def value(x):
        r = np.asarray(x) - mu
        return 0.5 * np.sum(r * (r @ P), axis=-1)

    def gradient(x):
        return (np.asarray(x) - mu) @ P

    def hessian(x):
        return np.array(P)

    return PotentialSpec(
        name="gaussian",
        dim=mu.size,
        value=value,
        gradient=gradient,
        hessian=hessian,
        bounds=SpectralBounds(ev[0], ev[-1]),
        truth=(np.array(mu), np.array(Sigma)),
        quadratic_form=(np.array(mu), np.array(P)),
        params={"mean": mu.tolist(), "cov": Sigma.tolist()},
    )


def correlated_gaussian() -> PotentialSpec:
    """The two-dimensional benchmark Gaussian: ``m ~ 0.01``, ``L ~ 1``."""
    return gaussian_general([0.0, 1.0], [[1.0, 0.5], [0.5, 100.0]])


def gaussian_mixture(a, Sigma) -> PotentialSpec:
    """Equal-weight mixture of ``N(a, Sigma)`` and ``N(-a, Sigma)``.

    ``f(x) = |x - a|^2_Lam / 2 - log(1 + exp(-2 x^T b))`` with
    ``Lam = Sigma^{-1}`` and ``b = Lam a``. Strongly convex only when
    ``a^T Lam a < 1``; bounds are the extreme eigenvalues of ``Lam``.
    """
    a = _readonly(np.ravel(a))
    Sigma = _check_spd(Sigma, "Sigma")
    if Sigma.shape[0] != a.size:
        raise ValueError("a and Sigma dimensions differ")
    Lam = np.linalg.inv(Sigma)
    Lam = _readonly(0.5 * (Lam + Lam.T))
    b = _readonly(Lam @ a)
    if float(a @ b) >= 1.0:
        raise ValueError(f"a^T Sigma^-1 a = {a @ b:.6g} >= 1; potential is not strongly convex")
    ev = np.linalg.eigvalsh(Lam)

    def value(x):
        r = np.asarray(x) - a
        return 0.5 * np.sum(r * (r @ Lam), axis=-1) - np.logaddexp(0.0, -2.0 * (x @ b))

    def gradient(x):
        x = np.asarray(x)
        s = expit(-2.0 * (x @ b))
        return (x - a) @ Lam + 2.0 * s[..., None] * b

    def hessian(x):
        s = expit(-2.0 * (np.asarray(x) @ b))
        return Lam - 4.0 * s * (1.0 - s) * np.outer(b, b)

    mean = np.zeros(a.size)
    cov = Sigma + np.outer(a, a)
    return PotentialSpec(
        name="mixture",
        dim=a.size,
        value=value,
        gradient=gradient,
        hessian=hessian,
        bounds=SpectralBounds(ev[0], ev[-1]),
        truth=(mean, cov),
        params={"a": a.tolist(), "cov": Sigma.tolist()},
    )


def symmetric_mixture(d: int = 10) -> PotentialSpec:
    """Mixture with ``a[i] = sqrt(i) / (2 d)`` and ``Sigma = diag(i / d)``."""
    i = np.arange(1, d + 1)
    return gaussian_mixture(np.sqrt(i) / (2.0 * d), np.diag(i / d))


def load_labeled_csv(path, standardize: bool = True) -> LabeledDataset:
    """Read a CSV with a header row and a ``label`` column of 0/1 values.

    Every other column is a numeric feature. With ``standardize`` each
    feature column is centred and scaled to unit variance (constant columns
    are only centred).
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        rows = [row for row in reader if row]
    if "label" not in header:
        raise ValueError(f"{path}: no 'label' column in header {header}")
    j = header.index("label")
    table = np.array(rows, dtype=float)
    raw = table[:, j]
    if not np.all(np.isin(raw, (0.0, 1.0))):
        raise ValueError(f"{path}: labels must be 0 or 1")
    z = np.delete(table, j, axis=1)
    if standardize:
        z = z - z.mean(axis=0)
        sd = z.std(axis=0)
        z = z / np.where(sd > 0.0, sd, 1.0)
    return LabeledDataset(features=z, labels=2.0 * raw - 1.0)


def _logistic_spec(data: LabeledDataset, alpha: float, bounds, params):
    Z, y = data.features, data.labels
    Zy = Z * y[:, None]

    def value(w):
        margins = np.asarray(w) @ Zy.T
        return np.sum(np.logaddexp(0.0, -margins), axis=-1) + 0.5 * alpha * np.sum(
            np.asarray(w) ** 2, axis=-1
        )

    def gradient(w):
        w = np.asarray(w)
        s = expit(-(w @ Zy.T))
        return -(s @ Zy) + alpha * w

    def hessian(w):
        s = expit(-(np.asarray(w) @ Zy.T))
        return (Z.T * (s * (1.0 - s))) @ Z + alpha * np.eye(Z.shape[1])

    return PotentialSpec(
        name="logistic",
        dim=Z.shape[1],
        value=value,
        gradient=gradient,
        hessian=hessian,
        bounds=bounds,
        params=params,
    )


def logistic_regression(
    data: LabeledDataset, alpha: float = 1.0, tol: float = 1e-8, max_iter: int = 100
) -> PotentialSpec:
    """Bayesian logistic regression posterior with a ``N(0, I / alpha)`` prior.

    The spectral bounds are the extreme Hessian eigenvalues at the posterior
    mode, which is found with :func:`newton_map`.
    """
    if data.n == 0:
        raise ValueError("dataset is empty")
    if not alpha > 0.0:
        raise ValueError("alpha must be positive")
    params = {"alpha": float(alpha), "n": data.n}
    provisional = _logistic_spec(data, alpha, SpectralBounds(alpha, alpha), params)
    w_map = newton_map(provisional, np.zeros(provisional.dim), tol=tol, max_iter=max_iter)
    bounds = hessian_extreme_eigs(provisional, w_map)
    params = dict(params, mode=w_map.tolist())
    return replace(provisional, bounds=bounds, params=params)


def hard_potential(kappa: float, h: float, d: int) -> PotentialSpec:
    """Step-size-dependent potential; 1-strongly convex and ``kappa``-smooth.

    Coordinate 1 is ``x**2 / 2``; coordinates 2..d are
    ``kappa/3 x**2 - kappa h/3 cos(x / sqrt(h))``.
    """
    if not kappa >= 1.0:
        raise ValueError("kappa must be >= 1")
    if not h > 0.0:
        raise ValueError("h must be positive")
    if d < 1 or int(d) != d:
        raise ValueError("d must be a positive integer")
    d = int(d)
    sh = np.sqrt(h)
    first = np.zeros(d, dtype=bool)
    first[0] = True

    def value(x):
        x = np.asarray(x)
        rest = kappa / 3.0 * x**2 - kappa * h / 3.0 * np.cos(x / sh)
        return np.sum(np.where(first, 0.5 * x**2, rest), axis=-1)

    def gradient(x):
        x = np.asarray(x)
        rest = 2.0 * kappa / 3.0 * x + kappa * sh / 3.0 * np.sin(x / sh)
        return np.where(first, x, rest)

    def hessian(x):
        x = np.asarray(x)
        rest = 2.0 * kappa / 3.0 + kappa / 3.0 * np.cos(x / sh)
        return np.diag(np.where(first, 1.0, rest))

    return PotentialSpec(
        name="hard",
        dim=d,
        value=value,
        gradient=gradient,
        hessian=hessian,
        bounds=SpectralBounds(1.0, max(1.0, float(kappa))),
        params={"kappa": float(kappa), "h": float(h), "d": d},
    )


def newton_map(p: PotentialSpec, x0, tol: float = 1e-8, max_iter: int = 50):
    """Minimise ``p`` with damped Newton steps until ``|grad| <= tol``."""
    if p.hessian is None:
        raise ValueError(f"potential {p.name!r} has no analytic Hessian")
    x = np.array(x0, dtype=float)
    for _ in range(max_iter + 1):
        g = p.gradient(x)
        if np.linalg.norm(g) <= tol:
            return x
        try:
            step = np.linalg.solve(p.hessian(x), g)
        except np.linalg.LinAlgError:
            raise ConvergenceError("singular Hessian in Newton step") from None
        fx = p.value(x)
        slope = float(g @ step)
        t = 1.0
        while p.value(x - t * step) > fx - 1e-4 * t * slope and t > 1e-12:
            t *= 0.5
        x = x - t * step
    raise ConvergenceError(
        f"Newton did not reach |grad| <= {tol} in {max_iter} iterations "
        f"(|grad| = {np.linalg.norm(p.gradient(x)):.3g})"
    )


def hessian_extreme_eigs(p: PotentialSpec, x) -> SpectralBounds:
    """Smallest and largest Hessian eigenvalue of ``p`` at ``x``."""
    if p.hessian is None:
        raise ValueError(f"potential {p.name!r} has no analytic Hessian")
    H = np.asarray(p.hessian(np.asarray(x, dtype=float)), dtype=float)
    if np.max(np.abs(H - H.T)) > 1e-8 * max(1.0, np.max(np.abs(H))):
        raise ValueError("Hessian is not symmetric")
    ev = np.linalg.eigvalsh(0.5 * (H + H.T))
    return SpectralBounds(ev[0], ev[-1])


def make_potential(name: str, **params) -> PotentialSpec:
    """Build a potential from a name and a parameter block (harness configs)."""
    if name == "quadratic":
        return quadratic_diag(params["eigenvalues"])
    if name == "gaussian":
        if "mean" not in params and "cov" not in params:
            return correlated_gaussian()
        cov = np.asarray(params["cov"], dtype=float)
        return gaussian_general(params.get("mean", np.zeros(cov.shape[0])), cov)
    if name == "mixture":
        if "a" in params:
            return gaussian_mixture(params["a"], params["cov"])
        return symmetric_mixture(int(params.get("d", 10)))
    if name == "logistic":
        data = load_labeled_csv(params["csv"], standardize=params.get("standardize", True))
        return logistic_regression(data, alpha=float(params.get("alpha", 1.0)))
    if name == "hard":
        return hard_potential(
            float(params.get("kappa", 50.0)), float(params["h"]), int(params.get("d", 10))
        )
    raise ValueError(f"unknown potential {name!r}")
