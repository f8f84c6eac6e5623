"""Experiment orchestration: seeded trials, sweeps, audits, CSV/JSON output.

Output contract: every invocation writes one long-format CSV with a fixed,
documented column order plus a JSON summary next to it.  CSV bytes are a
pure function of the configuration (trial wall times are deliberately kept
out of the CSV and reported only as aggregates in the JSON), and per-trial
seeds are derived from the master seed and trial index, so a work pool can
run trials in any order without changing the output.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import rng
from .backends import ACTIVE_BACKEND
from .distribution import (
    DiscreteDistribution,
    exact_entropy,
    make_hard_pair,
    parse_inline,
)
from .estimators import (
    SimpleConfig,
    abis_entropy_estimate,
    bucketed_entropy_estimate,
    default_r,
    default_t,
    plugin_entropy_report,
    simple_entropy_estimate,
)
from .sampling import ReplaySource, SampleSource, StreamExhausted

ESTIMATORS = ("simple", "bucketed", "abis", "plugin")

RUN_COLUMNS = (
    "trial",
    "seed",
    "estimate",
    "exact_entropy",
    "abs_error",
    "samples_used",
    "failed",
    "working_registers",
)

SWEEP_COLUMNS = (
    "estimator",
    "k",
    "eps",
    "trials",
    "mean_estimate",
    "mean_abs_error",
    "success_within_eps",
    "mean_samples",
    "fail_fraction",
)

AUDIT_COLUMNS = (
    "estimator",
    "k",
    "eps",
    "working_registers",
    "program_constants",
)

HARDPAIR_COLUMNS = (
    "trial",
    "seed",
    "entropy_high_bias",
    "entropy_low_bias",
    "gap",
    "estimate_high_bias",
    "estimate_low_bias",
    "estimator_separated",
)


class ConfigError(ValueError):
    """Bad experiment configuration (maps to CLI exit code 1)."""


@dataclass(frozen=True)
class ExperimentConfig:
    estimator: str
    dist: str  # inline family spec, '@file', or existing path
    k: int
    eps: float
    trials: int = 1
    seed: int = 0
    overrides: dict = field(default_factory=dict)
    replay: Optional[str] = None
    jobs: int = 1

    def __post_init__(self):
        if self.estimator not in ESTIMATORS:
            raise ConfigError(
                f"unknown estimator {self.estimator!r}; expected one of {ESTIMATORS}"
            )
        if self.trials < 1:
            raise ConfigError("need at least one trial")
        if not 0.0 < self.eps < 1.0:
            raise ConfigError("eps must lie in (0, 1)")
        if self.replay is not None and self.trials != 1:
            raise ConfigError("replayed streams are a single fixed sequence; use trials=1")
        unknown = set(self.overrides) - _KNOWN_OVERRIDES
        if unknown:
            raise ConfigError(f"unknown overrides: {sorted(unknown)}")


_KNOWN_OVERRIDES = {
    "r",
    "t",
    "m",
    "budget_factor",
    "rep_multiplier",
    "correction_reps",
    "plugin_n",
    "abis_n",
    "abis_cost_const",
    "amplify",
}


@dataclass
class TrialRecord:
    trial: int
    seed: int
    estimate: float
    exact_entropy: Optional[float]
    abs_error: Optional[float]
    samples_used: int
    failed: bool
    wall_time_s: float
    working_registers: int


def _build_dist(cfg: ExperimentConfig) -> Optional[DiscreteDistribution]:
    if cfg.replay is not None:
        return None
    try:
        dist = parse_inline(cfg.dist, cfg.k, cfg.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if dist.k != cfg.k:
        raise ConfigError(
            f"distribution file has alphabet size {dist.k} but the "
            f"experiment is configured for k={cfg.k}"
        )
    return dist


def _make_source(cfg: ExperimentConfig, dist, trial_index: int):
    if cfg.replay is not None:
        return ReplaySource.from_file(cfg.replay, cfg.k)
    return SampleSource(dist, rng.trial_seed(cfg.seed, trial_index))


def _int_override(ov, key):
    v = ov.get(key)
    return None if v is None else int(v)


def _run_estimator_once(cfg: ExperimentConfig, src):
    ov = cfg.overrides
    if cfg.estimator in ("simple", "abis"):
        scfg = SimpleConfig.from_k_eps(
            cfg.k,
            cfg.eps,
            r=_int_override(ov, "r"),
            t=_int_override(ov, "t"),
            m=_int_override(ov, "m"),
            budget_factor=float(ov.get("budget_factor", 10.0)),
        )
        if "rep_multiplier" in ov:
            scfg = SimpleConfig(
                k=scfg.k,
                eps=scfg.eps,
                r=scfg.r,
                t=scfg.t,
                m=max(1, math.ceil(scfg.m * float(ov["rep_multiplier"]))),
                budget_factor=scfg.budget_factor,
            )
        if cfg.estimator == "simple":
            return simple_entropy_estimate(src, scfg)
        return abis_entropy_estimate(
            src,
            scfg,
            per_rep_draws=_int_override(ov, "abis_n"),
            cost_const=float(ov.get("abis_cost_const", 1.0)),
        )
    if cfg.estimator == "bucketed":
        reps_mult = float(ov.get("rep_multiplier", 1.0))
        corr_reps = _int_override(ov, "correction_reps")
        if corr_reps is None and "rep_multiplier" in ov:
            corr_reps = max(1, math.ceil(reps_mult * 12.0 / cfg.eps**2))
        return bucketed_entropy_estimate(
            src,
            cfg.k,
            cfg.eps,
            rep_multiplier=reps_mult,
            r=_int_override(ov, "r"),
            t=_int_override(ov, "t"),
            correction_reps=corr_reps,
        )
    n = _int_override(ov, "plugin_n") or math.ceil(cfg.k / cfg.eps**2)
    return plugin_entropy_report(src, n)


def _run_trial(cfg: ExperimentConfig, dist, trial_index: int) -> TrialRecord:
    t0 = time.perf_counter()
    src = _make_source(cfg, dist, trial_index)
    amplify = int(cfg.overrides.get("amplify", 1))
    try:
        if amplify > 1:
            # Median-of-copies success amplification: independent pipeline
            # runs on derived sub-seeds, median of their estimates.
            reports = []
            for copy in range(amplify):
                if cfg.replay is None:
                    sub_seed = rng.derive_key(src.seed, rng.PHASE_AMPLIFY, copy)
                    sub = SampleSource(dist, sub_seed)
                else:
                    sub = _make_source(cfg, dist, trial_index)
                reports.append(_run_estimator_once(cfg, sub))
            good = [r for r in reports if not r.failed]
            report = good[len(good) // 2] if good else reports[0]
            estimate = float(np.median([r.estimate for r in good])) if good else math.nan
            samples = sum(r.samples_used for r in reports)
            failed = not good
            registers = report.working_registers
        else:
            report = _run_estimator_once(cfg, src)
            estimate, samples = report.estimate, report.samples_used
            failed, registers = report.failed, report.working_registers
    except StreamExhausted:
        estimate, samples, failed, registers = math.nan, src.draws, True, 0
    wall = time.perf_counter() - t0
    h = exact_entropy(dist) if dist is not None else None
    err = abs(estimate - h) if (h is not None and not failed) else None
    return TrialRecord(
        trial=trial_index,
        seed=src.seed if cfg.replay is None else cfg.seed,
        estimate=estimate,
        exact_entropy=h,
        abs_error=err,
        samples_used=samples,
        failed=failed,
        wall_time_s=wall,
        working_registers=registers,
    )


def _trial_worker(args):
    cfg, trial_index = args
    dist = _build_dist(cfg)
    return _run_trial(cfg, dist, trial_index)


def run(cfg: ExperimentConfig, out: str | None = None):
    """Execute all trials; returns (records, summary).

    With ``out``, writes <out>/run.csv and <out>/run.json (out may also be
    a .csv path).  jobs > 1 runs trials in a process pool; aggregation is
    ordered by trial index, so output bytes do not depend on jobs.
    """
    t0 = time.perf_counter()
    dist = _build_dist(cfg)
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            records = list(
                pool.map(_trial_worker, [(cfg, i) for i in range(cfg.trials)])
            )
    else:
        records = [_run_trial(cfg, dist, i) for i in range(cfg.trials)]
    records.sort(key=lambda r: r.trial)
    summary = summarize(cfg, records)
    summary["wall_time_s"] = time.perf_counter() - t0
    if out:
        write_run_outputs(out, records, summary)
    return records, summary


def summarize(cfg: ExperimentConfig, records) -> dict:
    ok = [r for r in records if not r.failed]
    errs = [r.abs_error for r in ok if r.abs_error is not None]
    return {
        "config": {
            "estimator": cfg.estimator,
            "dist": cfg.dist,
            "k": cfg.k,
            "eps": cfg.eps,
            "trials": cfg.trials,
            "seed": cfg.seed,
            "overrides": dict(cfg.overrides),
            "replay": cfg.replay,
        },
        "backend": ACTIVE_BACKEND,
        "trials": len(records),
        "fail_fraction": 1.0 - len(ok) / len(records),
        "mean_estimate": float(np.mean([r.estimate for r in ok])) if ok else None,
        "mean_abs_error": float(np.mean(errs)) if errs else None,
        "success_within_eps": (
            float(np.mean([e <= cfg.eps for e in errs])) if errs else None
        ),
        "mean_samples": float(np.mean([r.samples_used for r in records])),
        "exact_entropy": records[0].exact_entropy if records else None,
    }


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv_bytes(columns, rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue().encode("utf-8")


def run_csv_bytes(records) -> bytes:
    rows = [
        (
            r.trial,
            r.seed,
            r.estimate,
            r.exact_entropy,
            r.abs_error,
            r.samples_used,
            r.failed,
            r.working_registers,
        )
        for r in records
    ]
    return _csv_bytes(RUN_COLUMNS, rows)


def _resolve_out(out: str, stem: str):
    if out.endswith(".csv"):
        base = out[:-4]
        return out, base + ".json"
    os.makedirs(out, exist_ok=True)
    return os.path.join(out, stem + ".csv"), os.path.join(out, stem + ".json")


def write_run_outputs(out, records, summary):
    csv_path, json_path = _resolve_out(out, "run")
    with open(csv_path, "wb") as fh:
        fh.write(run_csv_bytes(records))
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path


def sweep(
    estimators,
    k_values,
    eps_values,
    dist: str = "uniform",
    trials: int = 3,
    seed: int = 0,
    overrides: dict | None = None,
    out: str | None = None,
):
    """Grid of (estimator, k, eps) cells; one summary row per cell.

    The correction parameters (r, t) are pinned per (estimator, k) group
    at the defaults of the smallest eps in the grid, unless explicitly
    overridden.  Pinning isolates how the repetition budgets scale with
    the accuracy target: the pinned estimator is valid at every coarser
    eps (its bias only shrinks), whereas letting r and t jump with eps
    would fold their own growth into the fitted exponent.  The fitted
    least-squares slope of log(samples) vs log(1/eps) is reported per
    group in the JSON summary.
    """
    overrides = dict(overrides or {})
    if not estimators or not k_values or not eps_values:
        raise ConfigError("sweep needs a non-empty grid")
    eps_values = sorted(eps_values, reverse=True)  # coarse-to-fine rows
    pin_eps = min(eps_values)
    rows = []
    slopes = {}
    cells = {}
    t0 = time.perf_counter()
    for est in estimators:
        for k in k_values:
            group = []
            for eps in eps_values:
                ov = dict(overrides)
                if est in ("simple", "bucketed", "abis"):
                    ov.setdefault("r", default_r(pin_eps))
                    ov.setdefault("t", default_t(pin_eps))
                cfg = ExperimentConfig(
                    estimator=est,
                    dist=dist,
                    k=k,
                    eps=eps,
                    trials=trials,
                    seed=seed,
                    overrides=ov,
                )
                status = "ok"
                try:
                    _, cell = run(cfg)
                except Exception as exc:  # partial grids still complete
                    status = f"error: {exc}"
                    cell = None
                if cell is not None:
                    rows.append(
                        (
                            est,
                            k,
                            eps,
                            trials,
                            cell["mean_estimate"],
                            cell["mean_abs_error"],
                            cell["success_within_eps"],
                            cell["mean_samples"],
                            cell["fail_fraction"],
                        )
                    )
                    group.append((eps, cell["mean_samples"]))
                cells[f"{est},k={k},eps={eps}"] = status
            if len(group) >= 2:
                x = np.log([1.0 / e for e, _ in group])
                y = np.log([s for _, s in group])
                slopes[f"{est},k={k}"] = float(np.polyfit(x, y, 1)[0])
    summary = {
        "grid": {
            "estimators": list(estimators),
            "k": list(k_values),
            "eps": list(eps_values),
            "dist": dist,
            "trials": trials,
            "seed": seed,
            "overrides": overrides,
            "pinned_r": default_r(pin_eps),
            "pinned_t": default_t(pin_eps),
        },
        "backend": ACTIVE_BACKEND,
        "cells": cells,
        "inv_eps_exponent": slopes,
        "wall_time_s": time.perf_counter() - t0,
    }
    if out:
        csv_path, json_path = _resolve_out(out, "sweep")
        with open(csv_path, "wb") as fh:
            fh.write(_csv_bytes(SWEEP_COLUMNS, rows))
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return rows, summary


AUDIT_K_VALUES = (2, 2**10, 2**16)


def audit_memory(eps: float = 0.1, k_values=AUDIT_K_VALUES, seed: int = 0, out=None):
    """Working-register and program-constant accounting per estimator and k.

    Pipelines run with repetition counts overridden to near-nothing:
    registers are declared up front, so their count does not depend on how
    many repetitions execute.  Passes when both streaming pipelines report
    identical register counts across all k and the plug-in baseline's
    state grows; exits nonzero otherwise (CLI).
    """
    rows = []
    registers = {"simple": set(), "bucketed": set()}
    plugin_regs = []
    for k in k_values:
        for est in ("simple", "bucketed", "plugin"):
            ov = {"m": 2, "plugin_n": 64, "rep_multiplier": 1e-9, "correction_reps": 2}
            cfg = ExperimentConfig(
                estimator=est, dist="uniform", k=k, eps=eps, seed=seed, overrides=ov
            )
            dist = _build_dist(cfg)
            rec = _run_estimator_once(cfg, _make_source(cfg, dist, 0))
            rows.append((est, k, eps, rec.working_registers, rec.program_constants))
            if est == "plugin":
                plugin_regs.append(rec.working_registers)
            else:
                registers[est].add(rec.working_registers)
    constant_ok = all(len(v) == 1 for v in registers.values())
    plugin_grows = all(a < b for a, b in zip(plugin_regs, plugin_regs[1:]))
    summary = {
        "eps": eps,
        "k_values": list(k_values),
        "backend": ACTIVE_BACKEND,
        "streaming_registers_constant": constant_ok,
        "plugin_state_grows": plugin_grows,
        "passed": constant_ok and plugin_grows,
    }
    if out:
        csv_path, json_path = _resolve_out(out, "audit")
        with open(csv_path, "wb") as fh:
            fh.write(_csv_bytes(AUDIT_COLUMNS, rows))
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return rows, summary


def hardpair(
    k: int,
    eps: float,
    trials: int,
    seed: int = 0,
    estimator: str | None = None,
    overrides: dict | None = None,
    out: str | None = None,
):
    """Exact entropies (and optional estimates) for hard instance pairs."""
    if trials < 1:
        raise ConfigError("need at least one trial")
    rows = []
    gaps = []
    separated_est = []
    for tr in range(trials):
        tseed = rng.trial_seed(seed, tr)
        hi, lo = make_hard_pair(k, eps, tseed)
        h_hi = exact_entropy(hi.dist)
        h_lo = exact_entropy(lo.dist)
        gaps.append(h_lo - h_hi)
        est_hi = est_lo = None
        est_sep = None
        if estimator is not None:
            for which, inst in (("hi", hi), ("lo", lo)):
                cfg = ExperimentConfig(
                    estimator=estimator,
                    dist="uniform",  # placeholder; source built directly below
                    k=2 * k,
                    eps=eps,
                    seed=tseed,
                    overrides=dict(overrides or {}),
                )
                src = SampleSource(
                    inst.dist,
                    rng.derive_key(tseed, rng.PHASE_HARDPAIR_EST, 0 if which == "hi" else 1),
                )
                rec = _run_estimator_once(cfg, src)
                if which == "hi":
                    est_hi = rec.estimate
                else:
                    est_lo = rec.estimate
            est_sep = bool(est_lo > est_hi)
            separated_est.append(est_sep)
        rows.append((tr, tseed, h_hi, h_lo, h_lo - h_hi, est_hi, est_lo, est_sep))
    gaps_arr = np.asarray(gaps)
    mean = float(gaps_arr.mean())
    std = float(gaps_arr.std(ddof=1)) if trials > 1 else 0.0
    half = 1.959963984540054 * std / math.sqrt(trials) if trials > 1 else 0.0
    summary = {
        "k": k,
        "eps": eps,
        "trials": trials,
        "seed": seed,
        "mean_gap": mean,
        "std_gap": std,
        "gap_ci95": [mean - half, mean + half],
        "separation_frequency": float(np.mean(gaps_arr > 0)),
        "estimator": estimator,
        "estimator_separation_frequency": (
            float(np.mean(separated_est)) if separated_est else None
        ),
    }
    if out:
        csv_path, json_path = _resolve_out(out, "hardpair")
        with open(csv_path, "wb") as fh:
            fh.write(_csv_bytes(HARDPAIR_COLUMNS, rows))
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return rows, summary
