"""Command-line interface.

Subcommands: run, sweep, audit, validate, oracle, poly, hardpair.
Exit codes: 0 success, 1 configuration error, 2 validation/audit failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .backends import ACTIVE_BACKEND
from .correction import ConfigurationError, build_correction, dump_coefficients
from .distribution import DistributionError, parse_inline
from .estimators import configure_buckets
from .harness import (
    ConfigError,
    ExperimentConfig,
    audit_memory,
    hardpair,
    run,
    sweep,
)
from .oracle import (
    TruncationPolicy,
    exact_H_tilde,
    exact_bucket_stats,
    expected_eta,
    expected_log_X_over_t,
    nb_pmf,
)
from .validation import check_names, run_checks


def _parse_overrides(pairs):
    out = {}
    for item in pairs or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--override expects key=value, got {item!r}")
        out[key.strip()] = float(val)
    return out


def _add_common(p):
    p.add_argument("--k", type=int, help="alphabet size")
    p.add_argument("--eps", type=float, default=0.1, help="additive accuracy target")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--out", help="output directory or .csv path")
    p.add_argument(
        "--override",
        action="append",
        metavar="KEY=VALUE",
        help="constant override (r, t, m, budget_factor, rep_multiplier, "
        "correction_reps, plugin_n, abis_n, abis_cost_const, amplify); repeatable",
    )


def build_parser():
    ap = argparse.ArgumentParser(
        prog="entrostream",
        description="Constant-memory streaming entropy estimation "
        f"(stream backend: {ACTIVE_BACKEND})",
    )
    ap.add_argument("--version", action="version", version=f"entrostream {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one estimator over seeded trials")
    p.add_argument("--estimator", default="simple", help="simple|bucketed|abis|plugin")
    p.add_argument("--dist", default="uniform", help="family spec, '@file', or path")
    p.add_argument("--replay", help="newline-delimited 1-based symbol stream file")
    p.add_argument("--jobs", type=int, default=1, help="trial worker processes")
    _add_common(p)

    p = sub.add_parser("sweep", help="grid over estimators, k, and eps")
    p.add_argument("--estimator", default="bucketed", help="comma-separated list")
    p.add_argument("--dist", default="uniform")
    p.add_argument("--k", default="256", help="comma-separated alphabet sizes")
    p.add_argument("--eps", default="0.4,0.2,0.1", help="comma-separated accuracies")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--override", action="append", metavar="KEY=VALUE")

    p = sub.add_parser("audit", help="working-register / program-constant audit")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("validate", help="run named invariant and acceptance checks")
    p.add_argument("--only", action="append", help="substring filter; repeatable")
    p.add_argument("--quick", action="store_true", help="skip the slow checks")
    p.add_argument("--list", action="store_true", help="list check names and exit")
    p.add_argument("--out", help="write results as JSON")

    p = sub.add_parser("oracle", help="deterministic expectations with enclosures")
    p.add_argument(
        "quantity",
        choices=["expected-log", "expected-eta", "h-tilde", "bucket-stats", "nb-pmf"],
    )
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--r", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--x", type=int)
    p.add_argument("--x-max", type=int)
    p.add_argument("--dist", default="uniform")
    p.add_argument("--k", type=int)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("poly", help="dump exact correction coefficients")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--base", default="bits", choices=["bits", "nats"])
    p.add_argument("--out")

    p = sub.add_parser("hardpair", help="entropy gaps of hard instance pairs")
    p.add_argument("--estimator", help="optionally run an estimator on both instances")
    _add_common(p)

    return ap


def _cmd_run(args):
    k = args.k
    if k is None:
        if args.replay is not None:
            raise ConfigError("--k is required with --replay")
        # file-based specs carry their own alphabet size
        k = parse_inline(args.dist, None, args.seed).k
    cfg = ExperimentConfig(
        estimator=args.estimator,
        dist=args.dist,
        k=k,
        eps=args.eps,
        trials=args.trials,
        seed=args.seed,
        overrides=_parse_overrides(args.override),
        replay=args.replay,
        jobs=args.jobs,
    )
    _, summary = run(cfg, out=args.out)
    json.dump(summary, sys.stdout, indent=2, sort_keys=True)
    print()
    return 0


def _cmd_sweep(args):
    estimators = [s.strip() for s in args.estimator.split(",") if s.strip()]
    ks = [int(s) for s in str(args.k).split(",") if s.strip()]
    eps = [float(s) for s in str(args.eps).split(",") if s.strip()]
    _, summary = sweep(
        estimators,
        ks,
        eps,
        dist=args.dist,
        trials=args.trials,
        seed=args.seed,
        overrides=_parse_overrides(args.override),
        out=args.out,
    )
    json.dump(summary, sys.stdout, indent=2, sort_keys=True)
    print()
    return 0


def _cmd_audit(args):
    rows, summary = audit_memory(eps=args.eps, seed=args.seed, out=args.out)
    for row in rows:
        print("%-9s k=%-6d registers=%-4d program_constants=%d" % (row[0], row[1], row[3], row[4]))
    json.dump(summary, sys.stdout, indent=2, sort_keys=True)
    print()
    return 0 if summary["passed"] else 2


def _cmd_validate(args):
    if args.list:
        for name in check_names(quick=args.quick):
            print(name)
        return 0

    def report(res):
        mark = "PASS" if res.passed else "FAIL"
        print(f"{mark} {res.name} [{res.seconds:.2f}s] {res.detail}")
        sys.stdout.flush()

    results, ok = run_checks(names=args.only, quick=args.quick, report=report)
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(
                [res.__dict__ for res in results], fh, indent=2, sort_keys=True
            )
            fh.write("\n")
    return 0 if ok else 2


def _cmd_oracle(args):
    policy = TruncationPolicy(tol=args.tol)
    if args.quantity == "expected-log":
        _need(args, "p")
        v = expected_log_X_over_t(args.t, args.p, policy)
    elif args.quantity == "expected-eta":
        _need(args, "p", "r")
        corr = build_correction(args.t, args.r, base="bits")
        v = expected_eta(args.t, args.r, args.p, corr, policy)
    elif args.quantity == "nb-pmf":
        _need(args, "p", "x")
        print(repr(nb_pmf(args.t, args.p, args.x)))
        return 0
    elif args.quantity == "h-tilde":
        _need(args, "k")
        d = parse_inline(args.dist, args.k, args.seed)
        x_max = args.x_max or math.ceil(args.t * args.k / (args.eps * math.log(2.0)))
        v = exact_H_tilde(d, args.t, x_max, policy)
    else:  # bucket-stats
        _need(args, "k")
        d = parse_inline(args.dist, args.k, args.seed)
        cfg = configure_buckets(args.k, args.eps, args.t)
        for ell, row in enumerate(exact_bucket_stats(d, cfg), start=1):
            flag = " zero-mass" if row.zero_mass else ""
            print(f"interval {ell}: q={row.q!r} H={row.h!r}{flag}")
        return 0
    print(f"value {v.value!r}")
    print(f"enclosure {v.enclosure!r}")
    return 0


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise ConfigError(f"--{name} is required for this oracle")


def _cmd_poly(args):
    text = dump_coefficients(build_correction(args.t, args.r, base=args.base))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_hardpair(args):
    if args.k is None:
        raise ConfigError("--k is required")
    _, summary = hardpair(
        args.k,
        args.eps,
        args.trials,
        seed=args.seed,
        estimator=args.estimator,
        overrides=_parse_overrides(args.override),
        out=args.out,
    )
    json.dump(summary, sys.stdout, indent=2, sort_keys=True)
    print()
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "audit": _cmd_audit,
    "validate": _cmd_validate,
    "oracle": _cmd_oracle,
    "poly": _cmd_poly,
    "hardpair": _cmd_hardpair,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ConfigurationError, DistributionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
