"""Chebyshev polynomials on a spectral interval ``[m, L]``.

The scaled-and-shifted polynomial

    phi_bar_K(lam) = T_K(h(lam)) / T_K(h(0)),   h(lam) = (L + m - 2 lam) / (L - m)

has value 1 at ``lam = 0`` and its K roots inside ``(m, L)``. Its sup-norm on
``[m, L]`` decays like ``(1 - 2 sqrt(m) / (sqrt(L) + sqrt(m)))**K``, which is
what the Chebyshev integration times inherit through the cosine product

    P_K(lam) = prod_k cos(pi/2 * sqrt(lam / r_k)),   |P_K| <= |phi_bar_K|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrumError

__all__ = [
    "SpectralBounds",
    "ChebyshevRootSet",
    "cheb_first_kind",
    "h_map",
    "phi_bar",
    "cheb_roots",
    "rate_bound",
    "cosine_product",
    "psi",
    "gd_chebyshev_contraction",
]

_LOG2 = np.log(2.0)
# products longer than this are accumulated as log-magnitude + sign
_DIRECT_PRODUCT_MAX_K = 64
_PSI_PATCH = 1e-6


@dataclass(frozen=True)
class SpectralBounds:
    """Strong convexity ``m`` and smoothness ``L`` of a potential."""

    m: float
    L: float

    def __post_init__(self):
        m, L = float(self.m), float(self.L)
        if not (np.isfinite(m) and np.isfinite(L)):
            raise ValueError(f"spectral bounds must be finite, got m={m}, L={L}")
        if not 0.0 < m <= L:
            raise ValueError(f"need 0 < m <= L, got m={m}, L={L}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "L", L)

    @property
    def kappa(self) -> float:
        return self.L / self.m

    @property
    def degenerate(self) -> bool:
        return self.L == self.m


@dataclass(frozen=True)
class ChebyshevRootSet:
    """The K roots of ``phi_bar_K`` in ascending order (index k = 1..K)."""

    K: int
    roots: np.ndarray
    bounds: SpectralBounds

    def __len__(self):
        return self.K


def _as_bounds(b) -> SpectralBounds:
    if isinstance(b, SpectralBounds):
        return b
    m, L = b
    return SpectralBounds(m, L)


def _acosh1p(u):
    """``arccosh(1 + u)`` for ``u >= 0`` without cancellation near 0."""
    u = np.asarray(u, dtype=float)
    return np.log1p(u + np.sqrt(u * (u + 2.0)))


def _log_cosh(a):
    a = np.abs(np.asarray(a, dtype=float))
    return a + np.log1p(np.exp(-2.0 * a)) - _LOG2


def cheb_first_kind(K: int, x):
    """Chebyshev polynomial of the first kind ``T_K(x)`` for any real ``x``.

    Uses ``cos(K arccos x)`` on ``[-1, 1]`` and ``+-cosh(K arccosh |x|)``
    outside it.
    """
    if K < 0 or int(K) != K:
        raise ValueError(f"degree must be a nonnegative integer, got {K}")
    K = int(K)
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    inside = np.abs(x) <= 1.0
    out[inside] = np.cos(K * np.arccos(x[inside]))
    above = x > 1.0
    out[above] = np.cosh(K * np.arccosh(x[above]))
    below = x < -1.0
    out[below] = (-1.0) ** K * np.cosh(K * np.arccosh(-x[below]))
    return out[()] if out.ndim == 0 else out


def h_map(lam, b) -> np.ndarray:
    """Affine map sending ``m -> 1`` and ``L -> -1``."""
    b = _as_bounds(b)
    if b.degenerate:
        raise DegenerateSpectrumError("h_map is undefined when L == m")
    lam = np.asarray(lam, dtype=float)
    return (b.L + b.m - 2.0 * lam) / (b.L - b.m)


def phi_bar(K: int, lam, b):
    """Scaled-and-shifted Chebyshev polynomial ``T_K(h(lam)) / T_K(h(0))``.

    The denominator (and the numerator off ``[m, L]``) is evaluated in log
    space so large ``K`` neither overflows nor underflows. On ``[m, L]`` the
    angle ``arccos(h(lam))`` is taken from ``lam - m`` and ``L - lam``
    directly, which keeps full accuracy next to the interval ends.
    """
    if K < 0 or int(K) != K:
        raise ValueError(f"degree must be a nonnegative integer, got {K}")
    K = int(K)
    b = _as_bounds(b)
    if b.degenerate:
        raise DegenerateSpectrumError("phi_bar is undefined when L == m")
    m, L = b.m, b.L
    lam = np.asarray(lam, dtype=float)
    width = L - m
    log_den = _log_cosh(K * _acosh1p(2.0 * m / width))

    out = np.empty_like(lam)
    inside = (lam >= m) & (lam <= L)
    li = lam[inside]
    angle = 2.0 * np.arctan2(np.sqrt(li - m), np.sqrt(L - li))
    out[inside] = np.cos(K * angle) * np.exp(-log_den)

    low = lam < m
    a = K * _acosh1p(2.0 * (m - lam[low]) / width)
    out[low] = np.exp(_log_cosh(a) - log_den)

    high = lam > L
    a = K * _acosh1p(2.0 * (lam[high] - L) / width)
    out[high] = (-1.0) ** K * np.exp(_log_cosh(a) - log_den)
    return out[()] if out.ndim == 0 else out


def cheb_roots(K: int, b) -> ChebyshevRootSet:
    """Roots ``r_k = (L+m)/2 - (L-m)/2 cos((k - 1/2) pi / K)``, k = 1..K."""
    if K < 1 or int(K) != K:
        raise ValueError(f"degree must be a positive integer, got {K}")
    K = int(K)
    b = _as_bounds(b)
    k = np.arange(1, K + 1)
    roots = (b.L + b.m) / 2.0 - (b.L - b.m) / 2.0 * np.cos((k - 0.5) * np.pi / K)
    roots.setflags(write=False)
    return ChebyshevRootSet(K=K, roots=roots, bounds=b)


def rate_bound(K: int, b) -> float:
    """``2 (1 - 2 sqrt(m) / (sqrt(L) + sqrt(m)))**K``, computed in log space."""
    if K < 0 or int(K) != K:
        raise ValueError(f"degree must be a nonnegative integer, got {K}")
    b = _as_bounds(b)
    if K == 0:
        return 2.0
    sm, sL = np.sqrt(b.m), np.sqrt(b.L)
    base = (sL - sm) / (sL + sm)
    if base == 0.0:
        return 0.0
    return float(2.0 * np.exp(K * np.log(base)))


def _signed_product(factors, axis=-1):
    """Product along ``axis``; log-magnitude accumulation for long products."""
    factors = np.asarray(factors, dtype=float)
    if factors.shape[axis] <= _DIRECT_PRODUCT_MAX_K:
        return np.prod(factors, axis=axis)
    negatives = np.sum(factors < 0.0, axis=axis)
    sign = np.where(negatives % 2 == 0, 1.0, -1.0)
    with np.errstate(divide="ignore"):
        log_mag = np.sum(np.log(np.abs(factors)), axis=axis)
    return sign * np.exp(log_mag)


def cosine_product(lam, roots, order=None):
    """``prod_k cos(pi/2 * sqrt(lam / r_k))`` over the given roots.

    ``roots`` is a :class:`ChebyshevRootSet` or an array of positive roots.
    ``order`` optionally permutes the roots; the value does not depend on it.
    """
    r = roots.roots if isinstance(roots, ChebyshevRootSet) else np.asarray(roots, float)
    if order is not None:
        r = r[np.asarray(order)]
    if np.any(r <= 0.0):
        raise ValueError("roots must be positive")
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0.0):
        raise ValueError("lam must be nonnegative")
    factors = np.cos(0.5 * np.pi * np.sqrt(lam[..., None] / r))
    out = _signed_product(factors, axis=-1)
    return out[()] if np.ndim(out) == 0 else out


def psi(x):
    """``cos(pi/2 sqrt(x)) / (1 - x)`` with the removable singularity at 1 filled."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(np.isnan(x)):
        raise ValueError("psi is defined for x >= 0 only")
    out = np.full_like(x, np.pi / 4.0)
    away = np.abs(x - 1.0) >= _PSI_PATCH
    xa = x[away]
    out[away] = np.cos(0.5 * np.pi * np.sqrt(xa)) / (1.0 - xa)
    return out[()] if out.ndim == 0 else out


def gd_chebyshev_contraction(eigenvalues, roots, x0, order=None):
    """Gradient descent on ``0.5 * sum(lam_j w_j**2)`` with steps ``1 / r_k``.

    Runs one step per root, in ``order`` if given, and returns the final
    iterate. Coordinate j ends at ``phi_bar_K(lam_j) * x0[j]``.
    """
    rs = roots if isinstance(roots, ChebyshevRootSet) else None
    r = rs.roots if rs is not None else np.asarray(roots, float)
    if order is not None:
        r = r[np.asarray(order)]
    lam = np.asarray(eigenvalues, dtype=float)
    w = np.array(x0, dtype=float)
    if lam.shape != w.shape or lam.ndim != 1:
        raise ValueError(
            f"dimension mismatch: {lam.shape[0] if lam.ndim else 0} eigenvalues "
            f"vs x0 of shape {w.shape}"
        )
    if rs is not None:
        slack = 1e-12 * rs.bounds.L
        if np.any(lam < rs.bounds.m - slack) or np.any(lam > rs.bounds.L + slack):
            raise ValueError("eigenvalues must lie in [m, L]")
    for rk in r:
        w = w - (1.0 / rk) * (lam * w)
    return w
