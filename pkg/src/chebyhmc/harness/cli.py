"""``chebyhmc`` command line: verify, figure1, ideal, bench."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import PERM_MODES, SCHEDULES, RunConfig
from .io import OUT_ENV, default_out_dir
from .verify import FAULTS, report, run_checks

log = logging.getLogger("chebyhmc")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="RunConfig JSON file; flags override its fields")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./results)")
    p.add_argument("--threads", type=int, help="worker processes (default: available cores)")
    p.add_argument("--k", type=int, dest="K", help="iterations / schedule length")
    p.add_argument("--theta", type=float, action="append", help="leapfrog step size (repeatable)")
    p.add_argument("--schedule", choices=SCHEDULES, action="append", help="restrict to one schedule (repeatable)")
    p.add_argument("--perm", choices=PERM_MODES)
    p.add_argument("--potential", help="potential name (quadratic, gaussian, mixture, logistic, hard)")
    p.add_argument("--repeats", type=int)
    p.add_argument("--chains", type=int, help="ensemble size for per-iteration metrics")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chebyhmc", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run every invariant check and print a pass/fail table")
    v.add_argument("--fault", choices=FAULTS, help="inject a known defect (mutation test)")
    v.add_argument("--only", action="append", help="run only the named check(s)")

    f = sub.add_parser("figure1", help="contraction curves and psi as CSV")
    f.add_argument("--k", type=int, dest="K", default=400)
    f.add_argument("--m", type=float, default=1.0)
    f.add_argument("--L", type=float, default=100.0)
    f.add_argument("--step", type=float, default=0.1, help="lambda grid spacing")
    f.add_argument("--perm", choices=PERM_MODES, default="random")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--out")

    for name, text in (("ideal", "ideal-HMC ESS table and error series"), ("bench", "leapfrog HMC ESS benchmark")):
        _common(sub.add_parser(name, help=text))
    return ap


def _config(args) -> RunConfig:
    cfg = RunConfig.from_json(args.config) if args.config else RunConfig()
    if args.command == "ideal" and not args.config:
        # ideal HMC needs a quadratic target; default to diag covariance (1, 100)
        cfg = cfg.with_overrides(potential_params={"cov": [[1.0, 0.0], [0.0, 100.0]]}, x0=[0.0, 0.0],
                                 metrics=["ess", "cov_error", "tv"])
    return cfg.with_overrides(
        seed=args.seed,
        out=args.out,
        threads=args.threads,
        K=args.K,
        thetas=args.theta,
        schedules=args.schedule,
        perm=args.perm,
        potential=args.potential,
        repeats=args.repeats,
        chains=args.chains,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "verify":
            return report(run_checks(fault=args.fault, only=set(args.only) if args.only else None))
        from . import experiments

        if args.command == "figure1":
            res = experiments.figure1(
                args.out or default_out_dir(), K=args.K, m=args.m, L=args.L, step=args.step,
                perm=args.perm, seed=args.seed,
            )
            print(f"k={args.K}: chebyshev {res['chebyshev'][-1]:.6e}, constant {res['constant'][-1]:.6e}")
            print(f"wrote {res['contraction']} and {res['psi']}")
            return 0
        cfg = _config(args)
        if args.command == "ideal":
            res = experiments.ideal(cfg)
            for row in res["table"]:
                print(f"{row[0]:<20} mean ESS {row[1]:9.1f} +- {row[2]:7.1f}   min ESS {row[3]:9.1f} +- {row[4]:7.1f}")
        else:
            res = experiments.bench(cfg)
            for c in res["cells"]:
                print(
                    f"{c['schedule']:<10} theta={c['theta']:<6g} mean ESS {c['mean_ess'][0]:9.1f} +- {c['mean_ess'][1]:7.1f}"
                    f"   min ESS {c['min_ess'][0]:9.1f}   acc {c['acc_prob'][0]:.3f}"
                )
        print(f"results in {cfg.out}")
        return 0
    except (ValueError, OSError) as exc:
        print(f"chebyhmc {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
