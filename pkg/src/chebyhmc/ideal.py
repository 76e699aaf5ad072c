"""Ideal HMC: the exact Hamiltonian flow of a quadratic potential.

For ``f(x) = sum_j lam_j x_j**2`` each coordinate is a harmonic oscillator
with angular frequency ``sqrt(2 lam_j)``. Two chains that share velocity
draws contract coordinate-wise by ``cos(sqrt(2 lam_j) eta_k)`` per iteration,
so the W2 contraction after K iterations is the largest absolute cosine
product over the spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import VELOCITY, block_size, chain_rng
from .potentials import PotentialSpec
from .schedules import IntegrationSchedule

__all__ = [
    "PhaseState",
    "IdealTrace",
    "exact_flow",
    "hamiltonian",
    "ideal_hmc_run",
    "ideal_chain",
    "ideal_ensemble",
    "coupled_deviation",
    "contraction_factor",
    "contraction_curve",
    "flow_coordinates",
]


@dataclass(frozen=True)
class PhaseState:
    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if x.shape != v.shape:
            raise ValueError(f"position {x.shape} and velocity {v.shape} differ")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise ValueError("phase state has non-finite entries")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)


@dataclass(frozen=True)
class IdealTrace:
    """Positions ``x_0 .. x_K`` of one ideal-HMC chain."""

    states: np.ndarray
    schedule: IntegrationSchedule
    seed: int
    chain_id: int = 0

    @property
    def K(self) -> int:
        return self.states.shape[0] - 1

    @property
    def samples(self) -> np.ndarray:
        return self.states[1:]


def _check_lam(lam):
    lam = np.asarray(lam, dtype=float)
    if np.any(~(lam > 0.0)):
        raise ValueError("eigenvalues must be positive")
    return lam


def _rotate(lam, x, v, t):
    omega = np.sqrt(2.0 * lam)
    c, s = np.cos(omega * t), np.sin(omega * t)
    return c * x + s / omega * v, -omega * s * x + c * v


def exact_flow(lam, s0: PhaseState, t: float) -> PhaseState:
    """Flow ``(x, v)`` for time ``t`` under ``f(x) = sum(lam_j x_j**2)``."""
    lam = _check_lam(lam)
    if t < 0:
        raise ValueError("integration time must be nonnegative")
    x, v = _rotate(lam, s0.x, s0.v, t)
    return PhaseState(x, v)


def hamiltonian(lam, s: PhaseState) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    return np.sum(lam * s.x**2, axis=-1) + 0.5 * np.sum(s.v**2, axis=-1)


def coupled_deviation(lam, x0, y0, t: float) -> np.ndarray:
    """Gap between two exact flows started at ``x0`` and ``y0`` with one shared velocity."""
    lam = _check_lam(lam)
    return np.cos(np.sqrt(2.0 * lam) * t) * (np.asarray(x0, float) - np.asarray(y0, float))


def contraction_factor(lam, schedule: IntegrationSchedule) -> float:
    """``max_j |prod_k cos(sqrt(2 lam_j) eta_k)|``: the W2 contraction of the schedule."""
    return float(contraction_curve(lam, schedule)[-1])


def contraction_curve(lam, schedule: IntegrationSchedule) -> np.ndarray:
    """Running contraction after each prefix of the schedule.

    Entry k is ``max_j |prod_{s<=k} cos(sqrt(2 lam_j) eta_s)|``; entry 0 is 1.
    Products are accumulated as sums of ``log|cos|`` so K in the thousands
    does not underflow.
    """
    lam = np.atleast_1d(_check_lam(lam))
    omega = np.sqrt(2.0 * lam)
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(np.cos(np.outer(schedule.times, omega))))
    running = np.cumsum(logs, axis=0)
    curve = np.exp(np.max(running, axis=1))
    return np.concatenate([[1.0], curve])


def flow_coordinates(p: PotentialSpec):
    """Eigen-decomposition of a quadratic potential for exact simulation.

    Returns ``(lam, Q, center)`` such that ``f(center + Q y) = sum(lam_j y_j**2)``
    up to a constant; ``Q`` is None for already separable potentials.
    """
    if p.exact_flow_eigenvalues is not None:
        return np.asarray(p.exact_flow_eigenvalues, float), None, np.zeros(p.dim)
    if p.quadratic_form is None:
        raise ValueError(f"potential {p.name!r} has no closed-form Hamiltonian flow")
    center, A = p.quadratic_form
    w, Q = np.linalg.eigh(A)
    return 0.5 * w, Q, np.asarray(center, float)


def ideal_ensemble(
    p: PotentialSpec,
    schedule: IntegrationSchedule,
    x0,
    seed: int,
    chain_ids=None,
    on_step=None,
    keep_trajectory: bool = False,
):
    """Run independent ideal-HMC chains side by side.

    ``x0`` has shape ``(n, d)``. Chain i draws its velocities from its own
    stream, so its path is identical to a solo run with the same
    ``(seed, chain_id)``. ``on_step(k, X)`` is called after every iteration
    with the ``(n, d)`` positions. Returns the final positions, or the full
    ``(K + 1, n, d)`` trajectory when ``keep_trajectory`` is set.
    """
    lam, Q, center = flow_coordinates(p)
    X = np.atleast_2d(np.array(x0, dtype=float))
    n, d = X.shape
    if d != p.dim:
        raise ValueError(f"x0 has dimension {d}, potential has {p.dim}")
    ids = np.arange(n) if chain_ids is None else np.asarray(chain_ids)
    rngs = [chain_rng(seed, int(i), VELOCITY) for i in ids]

    Y = X - center
    if Q is not None:
        Y = Y @ Q
    times = schedule.times
    K = times.size
    traj = np.empty((K + 1, n, d)) if keep_trajectory else None
    if keep_trajectory:
        traj[0] = X
    B = block_size(n, d)
    for start in range(0, K, B):
        stop = min(K, start + B)
        xi = np.stack([g.standard_normal((stop - start, d)) for g in rngs], axis=1)
        for k in range(start, stop):
            V = xi[k - start] if Q is None else xi[k - start] @ Q
            Y, _ = _rotate(lam, Y, V, times[k])
            if traj is not None or on_step is not None:
                Xk = Y if Q is None else Y @ Q.T
                Xk = Xk + center
                if traj is not None:
                    traj[k + 1] = Xk
                if on_step is not None:
                    on_step(k + 1, Xk)
    if traj is not None:
        return traj
    out = Y if Q is None else Y @ Q.T
    return out + center


def ideal_chain(
    p: PotentialSpec, schedule: IntegrationSchedule, x0, seed: int, chain_id: int = 0
) -> IdealTrace:
    traj = ideal_ensemble(
        p, schedule, np.atleast_2d(x0), seed, chain_ids=[chain_id], keep_trajectory=True
    )
    return IdealTrace(states=traj[:, 0, :], schedule=schedule, seed=seed, chain_id=chain_id)


def ideal_hmc_run(
    lam, schedule: IntegrationSchedule, x0, seed: int, chain_id: int = 0
) -> IdealTrace:
    """Ideal HMC on ``sum(lam_j x_j**2)`` with a fresh N(0, I) velocity per iteration."""
    from .potentials import quadratic_diag

    return ideal_chain(quadratic_diag(lam), schedule, x0, seed, chain_id)
