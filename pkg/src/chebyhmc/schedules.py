"""Integration-time schedules for HMC.

Two schedules are provided. The constant one uses ``pi / (2 sqrt(2 L))`` at
every iteration; the Chebyshev one uses ``pi / (2 sqrt(2 r_k))`` for the
roots ``r_k`` of the degree-K scaled-and-shifted Chebyshev polynomial on
``[m, L]``, visited in a chosen order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .chebyshev import SpectralBounds, _as_bounds, cheb_roots

__all__ = [
    "IntegrationSchedule",
    "constant_schedule",
    "chebyshev_schedule",
    "total_and_average_time",
    "pair_time_sum",
    "average_time_limit",
]

PERM_MODES = ("identity", "reversed", "random")


@dataclass(frozen=True)
class IntegrationSchedule:
    """Integration times in execution order.

    ``permutation[k]`` is the 0-based index of the unpermuted root used at
    iteration k (identity for constant schedules).
    """

    kind: str
    times: np.ndarray
    permutation: np.ndarray
    bounds: SpectralBounds
    seed: int | None = None
    perm_mode: str = field(default="identity")

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        perm = np.array(self.permutation, dtype=int)
        if times.ndim != 1 or times.size == 0:
            raise ValueError("a schedule needs at least one integration time")
        if np.any(~np.isfinite(times)) or np.any(times <= 0.0):
            raise ValueError("integration times must be finite and positive")
        if perm.shape != times.shape or not np.array_equal(
            np.sort(perm), np.arange(times.size)
        ):
            raise ValueError("permutation must be a bijection on 0..K-1")
        times.setflags(write=False)
        perm.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "permutation", perm)

    @property
    def K(self) -> int:
        return int(self.times.size)

    def __len__(self):
        return self.K

    def __iter__(self):
        return iter(self.times)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "K": self.K,
            "m": self.bounds.m,
            "L": self.bounds.L,
            "seed": self.seed,
            "perm_mode": self.perm_mode,
            "permutation": self.permutation.tolist(),
            "times": self.times.tolist(),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "IntegrationSchedule":
        sched = cls(
            kind=d["kind"],
            times=np.asarray(d["times"], dtype=float),
            permutation=np.asarray(d["permutation"], dtype=int),
            bounds=SpectralBounds(d["m"], d["L"]),
            seed=d.get("seed"),
            perm_mode=d.get("perm_mode", "identity"),
        )
        if sched.K != d.get("K", sched.K):
            raise ValueError("K does not match the number of times")
        return sched

    @classmethod
    def from_json(cls, text: str) -> "IntegrationSchedule":
        return cls.from_dict(json.loads(text))


def constant_schedule(K: int, b) -> IntegrationSchedule:
    """K copies of ``pi / (2 sqrt(2 L))``."""
    if K < 1 or int(K) != K:
        raise ValueError(f"K must be a positive integer, got {K}")
    b = _as_bounds(b)
    eta = 0.5 * np.pi / np.sqrt(2.0 * b.L)
    return IntegrationSchedule(
        kind="constant",
        times=np.full(int(K), eta),
        permutation=np.arange(int(K)),
        bounds=b,
    )


def _permutation(K: int, perm_mode: str, seed):
    if perm_mode == "identity":
        return np.arange(K)
    if perm_mode == "reversed":
        return np.arange(K)[::-1].copy()
    if perm_mode == "random":
        if seed is None:
            raise ValueError("random permutation needs an explicit seed")
        return np.random.default_rng(seed).permutation(K)
    raise ValueError(f"unknown perm_mode {perm_mode!r}; expected one of {PERM_MODES}")


def chebyshev_schedule(
    K: int, b, perm_mode: str = "random", seed: int | None = None
) -> IntegrationSchedule:
    """Chebyshev integration times ``pi / (2 sqrt(2 r_sigma(k)))``.

    ``perm_mode`` is ``"identity"`` (ascending roots, so descending times),
    ``"reversed"`` or ``"random"``. Random mode shuffles uniformly with
    ``numpy.random.default_rng(seed)`` and records the seed.
    """
    roots = cheb_roots(K, b)
    perm = _permutation(roots.K, perm_mode, seed)
    times = 0.5 * np.pi / np.sqrt(2.0 * roots.roots[perm])
    return IntegrationSchedule(
        kind="chebyshev",
        times=times,
        permutation=perm,
        bounds=roots.bounds,
        seed=seed if perm_mode == "random" else None,
        perm_mode=perm_mode,
    )


def total_and_average_time(s: IntegrationSchedule) -> tuple[float, float]:
    total = float(np.sum(s.times))
    return total, total / s.K


def pair_time_sum(k: int, K: int, b) -> float:
    """``1/sqrt(r_k) + 1/sqrt(r_{K+1-k})`` for ``1 <= k <= K // 2``."""
    if not 1 <= k <= K // 2:
        raise ValueError(f"k must lie in [1, {K // 2}], got {k}")
    r = cheb_roots(K, b).roots
    return float(1.0 / np.sqrt(r[k - 1]) + 1.0 / np.sqrt(r[K - k]))


def average_time_limit(b) -> float:
    """Large-K limit of the mean Chebyshev integration time.

    The times sample ``pi / (2 sqrt(2 r(phi)))`` at the midpoints of
    ``[0, pi]``; the mean converges to ``ellipk(1 - m/L) / sqrt(2 L)``.
    """
    from scipy.special import ellipk

    b = _as_bounds(b)
    return float(ellipk(1.0 - b.m / b.L) / np.sqrt(2.0 * b.L))
