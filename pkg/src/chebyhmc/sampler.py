"""Metropolis-adjusted HMC with leapfrog integration and a per-iteration time schedule."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ._rng import ACCEPT, VELOCITY, block_size, chain_rng
from .errors import NonFiniteStateError, ScheduleError
from .ideal import PhaseState
from .potentials import PotentialSpec
from .schedules import IntegrationSchedule

__all__ = [
    "ChainTrace",
    "leapfrog",
    "hmc_step",
    "leapfrog_steps",
    "run_chain",
    "run_ensemble",
]


@dataclass(frozen=True)
class ChainTrace:
    """Record of one HMC chain.

    ``samples[k]`` is the position after iteration k+1; rejected iterations
    repeat the previous position.
    """

    samples: np.ndarray
    accepted: np.ndarray
    acceptance_ratios: np.ndarray
    steps_per_iter: np.ndarray
    schedule: IntegrationSchedule
    theta: float
    seed: int
    chain_id: int = 0
    n_grad_evals: int = 0
    wall_time: float = 0.0

    @property
    def K(self) -> int:
        return self.samples.shape[0]

    @property
    def acceptance_rate(self) -> float:
        return float(np.mean(self.accepted))


def _integrate(grad, x, v, theta, S, fused):
    half = 0.5 * theta
    if fused:
        g = grad(x)
        for _ in range(S):
            v = v - half * g
            x = x + theta * v
            g = grad(x)
            v = v - half * g
        return x, v, S + 1
    for _ in range(S):
        v = v - half * grad(x)
        x = x + theta * v
        v = v - half * grad(x)
    return x, v, 2 * S


def leapfrog(p: PotentialSpec, s: PhaseState, theta: float, S: int, fused: bool = False) -> PhaseState:
    """S leapfrog steps of size ``theta``.

    The default form re-evaluates the gradient at the start of every step, as
    in the textbook listing; ``fused=True`` reuses it (S + 1 gradient calls
    instead of 2S) and gives the same floating-point result.
    """
    if S < 1 or int(S) != S:
        raise ValueError(f"number of leapfrog steps must be a positive integer, got {S}")
    if not theta > 0.0:
        raise ValueError("leapfrog step size must be positive")
    # blow-ups are reported below, not as numpy warnings
    with np.errstate(over="ignore", invalid="ignore"):
        x, v, _ = _integrate(p.gradient, np.asarray(s.x, float), np.asarray(s.v, float), theta, int(S), fused)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
        raise NonFiniteStateError(f"leapfrog diverged (theta={theta}, S={S})")
    return PhaseState(x, v)


def leapfrog_steps(schedule: IntegrationSchedule, theta: float) -> np.ndarray:
    """``floor(eta_k / theta)`` for every entry; all must be at least 1."""
    if not theta > 0.0:
        raise ValueError("leapfrog step size must be positive")
    steps = np.floor(schedule.times / theta).astype(int)
    if np.any(steps < 1):
        k = int(np.argmin(steps))
        raise ScheduleError(
            f"theta={theta} exceeds integration time {schedule.times[k]:.6g} at iteration {k + 1}"
        )
    return steps


def hmc_step(
    p: PotentialSpec,
    x,
    eta: float,
    theta: float,
    rng: np.random.Generator,
    accept_rng: np.random.Generator | None = None,
    fused: bool = False,
    zeta: float | None = None,
):
    """One Metropolis-adjusted HMC transition.

    Returns ``(x_next, accepted, alpha)``. Velocity comes from ``rng`` and the
    uniform acceptance draw from ``accept_rng`` (``rng`` if omitted). ``zeta``
    replaces the uniform draw after it is taken, for testing the reject path.
    """
    S = int(np.floor(eta / theta))
    if S < 1:
        raise ScheduleError(f"theta={theta} exceeds integration time {eta}")
    x = np.asarray(x, dtype=float)
    xi = rng.standard_normal(x.shape)
    u = (accept_rng or rng).random()
    if zeta is not None:
        u = zeta
    end = leapfrog(p, PhaseState(x, xi), theta, S, fused=fused)
    h0 = p.value(x) + 0.5 * np.sum(xi**2, axis=-1)
    h1 = p.value(end.x) + 0.5 * np.sum(end.v**2, axis=-1)
    log_alpha = min(0.0, float(h0 - h1))
    with np.errstate(divide="ignore"):
        accepted = bool(np.log(u) < log_alpha)
    return (end.x if accepted else x), accepted, float(np.exp(log_alpha))


def run_chain(
    p: PotentialSpec,
    schedule: IntegrationSchedule,
    theta: float,
    x0=None,
    seed: int = 0,
    chain_id: int = 0,
    fused: bool = False,
    force_zeta: float | None = None,
) -> ChainTrace:
    """K HMC iterations following ``schedule`` in execution order.

    ``x0`` defaults to the origin. ``force_zeta`` pins the acceptance draw
    (``1.0`` rejects every proposal).
    """
    steps = leapfrog_steps(schedule, theta)
    x = np.zeros(p.dim) if x0 is None else np.array(x0, dtype=float)
    if x.shape != (p.dim,):
        raise ValueError(f"x0 has shape {x.shape}, expected ({p.dim},)")
    rng = chain_rng(seed, chain_id, VELOCITY)
    accept_rng = chain_rng(seed, chain_id, ACCEPT)
    K = schedule.K
    samples = np.empty((K, p.dim))
    accepted = np.empty(K, dtype=bool)
    ratios = np.empty(K)
    t0 = time.perf_counter()
    for k, eta in enumerate(schedule.times):
        x, accepted[k], ratios[k] = hmc_step(
            p, x, eta, theta, rng, accept_rng, fused=fused, zeta=force_zeta
        )
        samples[k] = x
    wall = time.perf_counter() - t0
    per_iter = steps + 1 if fused else 2 * steps
    return ChainTrace(
        samples=samples,
        accepted=accepted,
        acceptance_ratios=ratios,
        steps_per_iter=steps,
        schedule=schedule,
        theta=float(theta),
        seed=seed,
        chain_id=chain_id,
        n_grad_evals=int(per_iter.sum()),
        wall_time=wall,
    )


def run_ensemble(
    p: PotentialSpec,
    schedule: IntegrationSchedule,
    theta: float,
    x0,
    seed: int,
    chain_ids=None,
    fused: bool = True,
    on_step=None,
):
    """Advance n independent HMC chains together.

    Chain i consumes the same random streams as ``run_chain(chain_id=i)``, so
    the two agree up to BLAS rounding in the batched gradient.

    Returns ``(positions, acceptance_rate)`` with shapes ``(n, d)`` and ``(n,)``.
    """
    steps = leapfrog_steps(schedule, theta)
    X = np.atleast_2d(np.array(x0, dtype=float))
    n, d = X.shape
    if d != p.dim:
        raise ValueError(f"x0 has dimension {d}, potential has {p.dim}")
    ids = np.arange(n) if chain_ids is None else np.asarray(chain_ids)
    vel = [chain_rng(seed, int(i), VELOCITY) for i in ids]
    acc = [chain_rng(seed, int(i), ACCEPT) for i in ids]
    n_acc = np.zeros(n)
    K = schedule.K
    B = block_size(n, d + 1)
    for start in range(0, K, B):
        stop = min(K, start + B)
        xi_blk = np.stack([g.standard_normal((stop - start, d)) for g in vel], axis=1)
        u_blk = np.stack([g.random(stop - start) for g in acc], axis=1)
        for k in range(start, stop):
            xi = xi_blk[k - start]
            xe, ve, _ = _integrate(p.gradient, X, xi, theta, int(steps[k]), fused)
            if not (np.all(np.isfinite(xe)) and np.all(np.isfinite(ve))):
                raise NonFiniteStateError(f"leapfrog diverged at iteration {k + 1}")
            h0 = p.value(X) + 0.5 * np.sum(xi**2, axis=-1)
            h1 = p.value(xe) + 0.5 * np.sum(ve**2, axis=-1)
            log_alpha = np.minimum(0.0, h0 - h1)
            u = u_blk[k - start]
            with np.errstate(divide="ignore"):
                take = np.log(u) < log_alpha
            X = np.where(take[:, None], xe, X)
            n_acc += take
            if on_step is not None:
                on_step(k + 1, X)
    return X, n_acc / K
