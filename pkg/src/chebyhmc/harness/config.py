"""Run configuration for the experiment harness."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ..potentials import PotentialSpec, make_potential
from ..sampler import leapfrog_steps
from ..schedules import PERM_MODES, chebyshev_schedule, constant_schedule

POTENTIALS = ("quadratic", "gaussian", "mixture", "logistic", "hard")
SCHEDULES = ("chebyshev", "constant")
METRICS = ("ess", "cov_error", "tv")


def derive_seed(seed: int, *keys: int) -> int:
    """Independent 32-bit seed for a sub-task keyed by integers."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1)[0])


@dataclass
class RunConfig:
    """Everything needed to reproduce a harness run.

    ``chains`` is the ensemble size for per-iteration metrics; None means
    10,000 for ideal runs and 100 for leapfrog runs.
    """

    potential: str = "gaussian"
    potential_params: dict = field(default_factory=dict)
    schedules: list = field(default_factory=lambda: list(SCHEDULES))
    K: int = 2000
    perm: str = "random"
    seed: int = 0
    thetas: list = field(default_factory=lambda: [0.05])
    repeats: int = 3
    chains: int | None = None
    out: str = field(default_factory=lambda: os.environ.get("CHEBYHMC_OUT", "results"))
    threads: int = 0
    fused: bool = True
    metrics: list = field(default_factory=lambda: ["ess"])
    x0: list | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return asdict(self)

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def n_workers(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)

    def build_potential(self, theta: float | None = None) -> PotentialSpec:
        params = dict(self.potential_params)
        if self.potential == "hard" and "h" not in params:
            if theta is None:
                raise ValueError("hard potential needs h (defaults to the leapfrog step size)")
            params["h"] = theta
        return make_potential(self.potential, **params)

    def build_schedule(self, kind: str, bounds, perm_seed: int):
        if kind == "chebyshev":
            seed = perm_seed if self.perm == "random" else None
            return chebyshev_schedule(self.K, bounds, self.perm, seed=seed)
        if kind == "constant":
            return constant_schedule(self.K, bounds)
        raise ValueError(f"unknown schedule {kind!r}")

    def validate(self, leapfrog: bool = True) -> None:
        """Check every module precondition before any chain starts."""
        if self.potential not in POTENTIALS:
            raise ValueError(f"unknown potential {self.potential!r}; choose from {POTENTIALS}")
        if int(self.K) != self.K or self.K < 1:
            raise ValueError("K must be a positive integer")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.chains is not None and self.chains < 2:
            raise ValueError("chains must be >= 2")
        if self.perm not in PERM_MODES:
            raise ValueError(f"perm must be one of {PERM_MODES}")
        bad = [s for s in self.schedules if s not in SCHEDULES]
        if bad or not self.schedules:
            raise ValueError(f"schedules must be drawn from {SCHEDULES}, got {self.schedules}")
        bad = [m for m in self.metrics if m not in METRICS]
        if bad:
            raise ValueError(f"unknown metrics {bad}; choose from {METRICS}")
        if not self.thetas or any(not t > 0 for t in self.thetas):
            raise ValueError("thetas must be positive")
        for theta in self.thetas if leapfrog else [None]:
            p = self.build_potential(theta if theta is not None else self.thetas[0])
            if self.x0 is not None and len(self.x0) != p.dim:
                raise ValueError(f"x0 has {len(self.x0)} entries, potential has dimension {p.dim}")
            if leapfrog:
                for kind in self.schedules:
                    leapfrog_steps(self.build_schedule(kind, p.bounds, 0), theta)
