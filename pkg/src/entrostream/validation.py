"""Named pass/fail checks: module invariants plus the acceptance gate.

Each check is registered under a stable name (the names are a contract;
renaming one is a breaking change).  ``run_checks`` executes a selection
and reports one line per check; the CLI maps any failure to exit code 2.

Statistical checks use fixed seeds, so outcomes are deterministic.  Checks
that compare a sampled mean against an oracle use self-calibrated standard
errors; checks of frozen constants (variance caps, boundedness constants,
bit budgets) use the calibrated values recorded here.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import rng
from .correction import (
    build_correction,
    coefficient_bit_bound,
    eval_g,
    poly_eval_float,
)
from .distribution import (
    DiscreteDistribution,
    entropy_gap_experiment,
    exact_entropy,
    make_family,
    make_hard_pair,
)
from .estimators import (
    SimpleConfig,
    bucketed_H_estimate,
    bucketed_entropy_estimate,
    configure_buckets,
    correction_average,
    default_r,
    default_t,
    log_estimator_once,
    plugin_entropy,
    simple_entropy_estimate,
)
from .harness import ExperimentConfig, audit_memory, run, run_csv_bytes, sweep
from .oracle import (
    TruncationPolicy,
    exact_H_tilde,
    exact_bucket_stats,
    expected_eta,
    expected_log_X_over_t,
    nb_pmf,
)
from .sampling import (
    BudgetGuard,
    SampleSource,
    draw_neg_binomial,
    guard_wrap,
    next_sample,
    observe_prefix_indicators,
)

# Frozen calibration constants (recorded once; changing them is a
# contract change, not a tuning knob).
MAX_ABS_G_BITS = 0.5  # bound on |g| over indicator patterns, default grid
SUBGAMMA_C2 = 1.2  # E[(Y-1)^2] <= C2 / t
SUBGAMMA_C4 = 5.0  # E[(Y-1)^4] <= C4 / t^2
VARIANCE_CONST = 4.0  # Var[log2(X/t)] <= 4 (log2 k + 1)^2
BIT_BUDGET_CONST = 8.0  # coefficient bits <= 8 r log2(r+1)

GRID_R = tuple(range(2, 13))  # default (r, t = 4 r^2) grid


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


_CHECKS: dict = {}


def _check(name, slow=False):
    def deco(fn):
        _CHECKS[name] = (fn, slow)
        return fn

    return deco


def check_names(quick=False):
    return [n for n, (_, slow) in _CHECKS.items() if not (quick and slow)]


def run_checks(names=None, quick=False, report=None):
    """Run selected checks; returns (results, all_passed)."""
    selected = check_names(quick)
    if names:
        wanted = []
        for pat in names:
            hits = [n for n in _CHECKS if pat in n]
            if not hits:
                raise KeyError(f"no check matches {pat!r}")
            wanted.extend(h for h in hits if h not in wanted)
        selected = wanted
    results = []
    for name in selected:
        fn, _ = _CHECKS[name]
        t0 = time.perf_counter()
        try:
            detail = fn() or ""
            passed = True
        except AssertionError as exc:
            detail, passed = str(exc), False
        except Exception as exc:  # broken check counts as failed, not crash
            detail, passed = f"{type(exc).__name__}: {exc}", False
        res = CheckResult(name, passed, detail, time.perf_counter() - t0)
        results.append(res)
        if report:
            report(res)
    return results, all(r.passed for r in results)


def _se(x):
    return float(np.std(x, ddof=1) / math.sqrt(len(x)))


# ---------------------------------------------------------------- distribution


@_check("distribution.uniform_entropy_exact")
def _uniform_entropy():
    for exp in range(0, 17):
        k = 2**exp
        h = exact_entropy(make_family("uniform", k))
        assert abs(h - exp) <= 1e-12, f"uniform k=2^{exp}: {h!r}"
    return "log2(k) exact to 1e-12 for k = 1 .. 2^16"


@_check("distribution.entropy_permutation_invariant")
def _entropy_permutation():
    base = make_family("zipf", 12, {"s": 1.0})
    h0 = exact_entropy(base)
    gen = np.random.default_rng(5)
    for _ in range(20):
        perm = tuple(float(base.probs[j]) for j in gen.permutation(12))
        h = exact_entropy(DiscreteDistribution(k=12, probs=perm))
        assert abs(h - h0) <= 1e-12, f"permuted entropy drifted: {h - h0:e}"
    return "20 random permutations agree to 1e-12"


@_check("distribution.hard_pair_exact_mass")
def _hard_pair_mass():
    for seed in range(25):
        hi, lo = make_hard_pair(40, 0.1, seed)
        for inst in (hi, lo):
            assert sum(inst.dist.exact_probs) == 1, "exact mass != 1"
    return "exact rational mass is 1 for 50 instances"


@_check("distribution.family_determinism")
def _family_determinism():
    for name, params in (
        ("uniform", None),
        ("zipf", {"s": 1.0}),
        ("zipf", {"s": 1.5}),
        ("geometric", {"q": 0.3}),
        ("two-point", {"p": 0.9}),
        ("dirichlet-random", None),
    ):
        a = make_family(name, 33, params, seed=9)
        b = make_family(name, 33, params, seed=9)
        assert a.probs == b.probs, f"{name} not reproducible"
    return "identical (name, k, params, seed) give identical vectors"


# -------------------------------------------------------------------- sampling


@_check("sampling.accounting_exactness")
def _accounting():
    d = make_family("zipf", 20, {"s": 1.0})
    src = SampleSource(d, 31)
    for rep in range(200):
        before = src.draws
        out = draw_neg_binomial(src, rep % 20, 3, cap=50)
        expect = out.draws if out.completed else 50
        assert out.completed or out.draws == 50, "Exceeded must consume exactly cap"
        assert src.draws - before == expect, "draw counter drifted"
        before = src.draws
        observe_prefix_indicators(src, rep % 20, 7)
        assert src.draws - before == 7, "prefix scan must consume exactly r"
    return "counter deltas equal X on success, cap on Exceeded, r on prefix"


@_check("sampling.reproducibility")
def _reproducibility():
    d = make_family("zipf", 100, {"s": 1.0})
    for seed in (0, 1, 77):
        a, b = SampleSource(d, seed), SampleSource(d, seed)
        xs_a = [draw_neg_binomial(a, i % 100, 4).draws for i in range(50)]
        xs_b = [draw_neg_binomial(b, i % 100, 4).draws for i in range(50)]
        assert xs_a == xs_b, "identical seeds must give identical scan lengths"
    return "identical seeds give identical X sequences"


@_check("sampling.fact_mean_draws", slow=True)
def _fact_mean_draws():
    t, reps = 16, 10_000
    details = []
    for fam, params in (("uniform", None), ("zipf", {"s": 1.0})):
        d = make_family(fam, 50, params)
        src = SampleSource(d, 13)
        totals = np.empty(reps)
        for j in range(reps):
            before = src.draws
            i = next_sample(src)
            draw_neg_binomial(src, i, t)
            totals[j] = src.draws - before
        want = 1 + t * 50
        got, se = totals.mean(), _se(totals)
        assert abs(got - want) <= 3 * se, f"{fam}: mean {got:.1f} vs {want} (se {se:.1f})"
        details.append(f"{fam}: {got:.1f} ~ {want} (se {se:.2f})")
    return "; ".join(details)


@_check("sampling.budget_markov")
def _budget_markov():
    d = make_family("uniform", 4)
    cfg = SimpleConfig.from_k_eps(4, 0.2, m=25, budget_factor=10.0)
    fails = 0
    for trial in range(1000):
        rep = simple_entropy_estimate(SampleSource(d, rng.trial_seed(3, trial)), cfg)
        fails += rep.failed
    assert fails <= 100, f"{fails}/1000 failures at budget factor 10"
    src = SampleSource(d, 0)
    out = guard_wrap(BudgetGuard(max_draws=0), src, lambda: next_sample(src))
    assert out.failed and out.draws_consumed == 0, "zero budget must fail immediately"
    return f"{fails}/1000 failures at factor 10 (Markov cap 100); zero budget fails at once"


@_check("sampling.budget_generous_never_fails")
def _budget_generous():
    d = make_family("uniform", 8)
    cfg = SimpleConfig.from_k_eps(8, 0.2, m=10, budget_factor=100.0)
    for trial in range(1000):
        rep = simple_entropy_estimate(SampleSource(d, rng.trial_seed(4, trial)), cfg)
        assert not rep.failed, f"trial {trial} failed at budget factor 100"
    return "0/1000 failures at factor 100"


# ------------------------------------------------------------------ correction


@_check("correction.degree_bound")
def _degree_bound():
    for r in GRID_R:
        corr = build_correction(4 * r * r, r, base="nats")
        assert len(corr.coeffs) == r + 1, f"r={r}: coefficient count"
        assert all(isinstance(c, Fraction) for c in corr.coeffs)
    return f"degree <= r exactly across r in {GRID_R[0]}..{GRID_R[-1]}"


@_check("correction.tail_sum_scaling")
def _tail_sum():
    worst = 0.0
    for r in GRID_R:
        t = 4 * r * r
        corr = build_correction(t, r, base="nats")
        bound = Fraction(2 * r, 2 * r)  # 2 r / sqrt(t) with sqrt(t) = 2r exact
        tail = corr.sum_abs_tail()
        assert tail <= bound, f"r={r}: sum |c_j| = {float(tail)} > {float(bound)}"
        worst = max(worst, float(tail / bound))
    return f"sum_j>=1 |c_j| <= 2r/sqrt(t); worst ratio {worst:.3f}"


@_check("correction.g_extreme_bound")
def _g_extreme():
    worst = 0.0
    for r in GRID_R:
        corr = build_correction(4 * r * r, r, base="bits")
        worst = max(worst, corr.g_extreme())
    assert worst <= MAX_ABS_G_BITS, f"max |g| = {worst} exceeds {MAX_ABS_G_BITS}"
    return f"max |g| over prefix patterns = {worst:.4f} <= {MAX_ABS_G_BITS}"


@_check("correction.eval_identity")
def _eval_identity():
    return check_correction_identity(build_correction(64, 4, base="nats"))


def check_correction_identity(corr, tol=1e-12):
    """g evaluated at (rho, rho^2, .., rho^r) must reproduce h_t(rho)."""
    for rho in (0.1, 0.5, 0.9):
        coeffs = [float(c) for c in corr.coeffs]
        g_val = coeffs[0] + sum(coeffs[j] * rho**j for j in range(1, corr.r + 1))
        h_val = poly_eval_float(corr.coeffs, rho)
        assert abs(g_val - h_val) <= tol, f"rho={rho}: g != h_t ({g_val - h_val:e})"
    assert eval_g(corr, corr.r) == 0.0, "full prefix must evaluate to exactly 0"
    return "g(rho, rho^2, ..) = h_t(rho) to 1e-12; full prefix gives exact 0"


@_check("correction.bit_complexity")
def _bit_complexity():
    worst = 0.0
    for r in GRID_R:
        corr = build_correction(4 * r * r, r, base="nats")
        rep = coefficient_bit_bound(corr, BIT_BUDGET_CONST)
        assert rep.passed, f"r={r}: {rep}"
        used = max(rep.max_numerator_bits, rep.max_denominator_bits)
        worst = max(worst, used / rep.limit_bits)
    return f"coefficient bits within {BIT_BUDGET_CONST} r log2(r+1); worst ratio {worst:.2f}"


@_check("correction.mc_agreement", slow=True)
def _mc_agreement():
    gen = np.random.default_rng(2024)
    draws = 200_000
    worst = 0.0
    for r in GRID_R:
        t = 4 * r * r
        corr = build_correction(t, r, base="nats")
        taylor = [0.0] + [(-1.0) ** (i + 1) / i for i in range(1, r + 1)]
        for rho in (0.05, 0.3, 0.7, 0.95):
            z = t + gen.negative_binomial(t, rho, size=draws)
            w = z * (rho / t) - 1.0
            f_vals = np.polynomial.polynomial.polyval(w, taylor)
            se = _se(f_vals)
            diff = abs(float(f_vals.mean()) - poly_eval_float(corr.coeffs, rho))
            assert diff <= 4 * se, f"(r={r}, rho={rho}): |mc - h_t| = {diff:e} > 4se {4*se:e}"
            worst = max(worst, diff / se if se else 0.0)
    return f"h_t matches MC mean of f(Z rho/t) on the full grid; worst {worst:.2f} se"


# ------------------------------------------------------------------ estimators


@_check("estimators.bias_oracle")
def _bias_oracle():
    r, t = default_r(0.1), default_t(0.1)
    corr = build_correction(t, r, base="bits")
    worst = 0.0
    for p in (0.05, 0.3, 0.7, 1.0):
        ev = expected_eta(t, r, p, corr)
        bias = abs(ev.value - math.log2(1.0 / p))
        assert bias <= 0.1, f"p={p}: |bias| = {bias}"
        worst = max(worst, bias)
    return f"|E[eta] - log2(1/p)| <= 0.1 at defaults; worst {worst:.2e}"


@_check("estimators.jensen_direction")
def _jensen():
    for p in (0.1, 0.5, 0.9):
        for t in (4, 64):
            v = expected_log_X_over_t(t, p).value
            assert v <= math.log2(1.0 / p) + 1e-9, f"(t={t}, p={p}): {v}"
    return "E[log2(X/t)] <= log2(1/p) on the spot grid (concavity)"


@_check("estimators.subgamma_moments", slow=True)
def _subgamma():
    gen = np.random.default_rng(77)
    draws = 200_000
    details = []
    for p in (0.1, 0.5):
        for t in (16, 64, 256):
            y = (t + gen.negative_binomial(t, p, size=draws)) * (p / t)
            m2 = float(np.mean((y - 1.0) ** 2))
            m4 = float(np.mean((y - 1.0) ** 4))
            assert m2 <= SUBGAMMA_C2 / t, f"(p={p}, t={t}): m2 {m2}"
            assert m4 <= SUBGAMMA_C4 / t**2, f"(p={p}, t={t}): m4 {m4}"
            details.append(f"t={t},p={p}: {m2 * t:.2f}/t, {m4 * t * t:.2f}/t^2")
    return "scaled moments within frozen caps: " + "; ".join(details[:3]) + " ..."


@_check("estimators.point_mass_exact")
def _point_mass():
    d = make_family("two-point", 2, {"p": 1.0})
    cfg = SimpleConfig.from_k_eps(2, 0.25, m=20)
    rep = simple_entropy_estimate(SampleSource(d, 5), cfg)
    assert rep.estimate == 0.0, f"simple on a point mass: {rep.estimate!r}"
    rep2 = bucketed_entropy_estimate(SampleSource(d, 5), 2, 0.25, rep_multiplier=0.01)
    assert rep2.estimate == 0.0, f"bucketed on a point mass: {rep2.estimate!r}"
    corr = build_correction(16, 2, base="bits")
    zbar = correction_average(SampleSource(d, 5), 16, 2, 50, corr)
    assert zbar == 0.0, f"correction average on a point mass: {zbar!r}"
    src = SampleSource(d, 5)
    assert plugin_entropy(src, 100) == 0.0
    return "simple, bucketed, correction, and plug-in all return exactly 0.0"


@_check("estimators.bucket_accounting")
def _bucket_accounting():
    d = make_family("zipf", 32, {"s": 1.0})
    cfg = configure_buckets(32, 0.2, 16, rep_multiplier=0.02)
    rep = bucketed_H_estimate(SampleSource(d, 21), cfg)
    total = sum(row.q_hat for row in rep.per_bucket)
    assert total == 1, f"sum of reported weights is {total}, not exactly 1"
    for row, lo, hi in zip(rep.per_bucket, cfg.breakpoints, cfg.breakpoints[1:]):
        assert row.c <= row.reps, "interval hit count exceeds its repetitions"
        if row.c > 0:
            lo_h, hi_h = math.log2(lo / cfg.t), math.log2(hi / cfg.t)
            assert lo_h - 1e-12 <= row.h_hat <= hi_h + 1e-12, (
                f"conditional mean {row.h_hat} outside [{lo_h}, {hi_h}]"
            )
    return "weights sum to exactly 1; c_l <= r_l; conditional means in range"


@_check("estimators.working_registers_constant")
def _registers_constant():
    counts = set()
    for k in (2, 2**10):
        d = make_family("uniform", k)
        cfg = SimpleConfig.from_k_eps(k, 0.1, m=2)
        counts.add(simple_entropy_estimate(SampleSource(d, 1), cfg).working_registers)
    assert len(counts) == 1, f"simple registers vary with k: {counts}"
    return f"simple pipeline registers = {counts.pop()} at k=2 and k=1024"


# ---------------------------------------------------------------------- oracle


@_check("oracle.pmf_normalization")
def _pmf_normalization():
    t, p = 16, 0.3
    tol = 1e-10
    mass = 0.0
    x = t
    while x < 2000:
        mass += nb_pmf(t, p, x)
        x += 1
    assert mass >= 1.0 - 2 * tol, f"truncated mass {mass}"
    return f"truncated mass (t=16, p=0.3) = {mass!r} >= 1 - 2e-10"


@_check("oracle.total_expectation")
def _total_expectation():
    d = make_family("uniform", 8)
    cfg = configure_buckets(8, 0.1, 16)
    stats = exact_bucket_stats(d, cfg)
    combined = sum(s.q * s.h for s in stats)
    target = exact_H_tilde(d, 16, cfg.x_max).value
    assert abs(combined - target) <= 1e-9, f"decomposition drift {combined - target:e}"
    mass = sum(s.q for s in stats)
    assert abs(mass - 1.0) <= 1e-12, f"interval mass {mass}"
    return f"sum q_l H_l - H~ = {combined - target:.2e}; interval mass {mass!r}"


@_check("oracle.mc_consistency", slow=True)
def _oracle_mc():
    gen = np.random.default_rng(4242)
    draws = 1_000_000
    t, p = 16, 0.3
    x = t + gen.negative_binomial(t, p, size=draws)
    vals = np.log2(x / t)
    se = _se(vals)
    want = expected_log_X_over_t(t, p).value
    diff = abs(float(vals.mean()) - want)
    assert diff <= 4 * se, f"|mc - oracle| = {diff:e} > 4 se = {4 * se:e}"
    # capped mixture: two-point(0.3), X' = min(X, 200)
    x_max = 200
    d2 = make_family("two-point", 2, {"p": 0.3})
    px = np.where(gen.random(draws) < 0.3, 0.3, 0.7)
    x2 = t + gen.negative_binomial(t, px)
    vals2 = np.log2(np.minimum(x2, x_max) / t)
    se2 = _se(vals2)
    want2 = exact_H_tilde(d2, t, x_max).value
    diff2 = abs(float(vals2.mean()) - want2)
    assert diff2 <= 4 * se2, f"capped: |mc - oracle| = {diff2:e} > 4 se = {4 * se2:e}"
    return (
        f"oracle vs 1e6-draw MC: |diff| = {diff:.2e} ({diff / se:.2f} se); "
        f"capped mixture {diff2 / se2:.2f} se"
    )


# --------------------------------------------------------------------- harness


@_check("harness.csv_determinism")
def _csv_determinism():
    cfg = ExperimentConfig(
        estimator="simple",
        dist="zipf:s=1",
        k=12,
        eps=0.25,
        trials=4,
        seed=11,
        overrides={"m": 40},
    )
    a, _ = run(cfg)
    b, _ = run(cfg)
    assert run_csv_bytes(a) == run_csv_bytes(b), "identical configs gave different bytes"
    return "identical config twice -> byte-identical CSV"


@_check("harness.samples_accounting")
def _samples_accounting():
    d = make_family("zipf", 12, {"s": 1.0})
    src = SampleSource(d, 19)
    before = src.draws
    rep = simple_entropy_estimate(src, SimpleConfig.from_k_eps(12, 0.25, m=30))
    assert rep.samples_used == src.draws - before, "report != counter delta"
    return "samples_used equals the source counter delta"


# ---------------------------------------------------------- acceptance criteria


@_check("acceptance.a01_correction_closed_forms")
def _a01():
    for t in (16, 64, 1024):
        corr = build_correction(t, 2, base="nats")
        want = (Fraction(-1, 2 * t), Fraction(1, 2 * t), Fraction(0))
        assert corr.coeffs == want, f"r=2, t={t}: {corr.coeffs}"
    for t in (4, 64, 1000):
        corr = build_correction(t, 1, base="nats")
        assert corr.coeffs == (Fraction(0), Fraction(0)), f"r=1, t={t}"
    return "r=2 gives (-1/(2t), 1/(2t), 0); r=1 gives the zero polynomial"


@_check("acceptance.a02_degree_and_tail_bounds")
def _a02():
    _degree_bound()
    detail = _tail_sum()
    return detail


@_check("acceptance.a03_bias_oracle")
def _a03():
    return _bias_oracle()


@_check("acceptance.a04_eta_monte_carlo", slow=True)
def _a04():
    t, r, p = 16, 2, 0.3
    corr = build_correction(t, r, base="bits")
    d = make_family("two-point", 2, {"p": p})
    src = SampleSource(d, 20240)
    n = 1_000_000
    vals = np.empty(n)
    for j in range(n):
        vals[j] = log_estimator_once(src, 0, t, r, corr)
    want = expected_eta(t, r, p, corr).value
    se = _se(vals)
    diff = abs(float(vals.mean()) - want)
    assert diff <= 3 * se, f"|mc - oracle| = {diff:e} > 3 se = {3 * se:e}"
    return f"1e6-draw eta mean within {diff / se:.2f} se of the oracle"


@_check("acceptance.a05_sample_complexity", slow=True)
def _a05():
    r, t = default_r(0.1), default_t(0.1)
    corr = build_correction(t, r, base="bits")
    reps = 10_000
    details = []
    for fam, params in (("uniform", None), ("zipf", {"s": 1.0})):
        d = make_family(fam, 50, params)
        src = SampleSource(d, 31337)
        totals = np.empty(reps)
        for j in range(reps):
            i = next_sample(src)
            before = src.draws
            log_estimator_once(src, i, t, r, corr)
            totals[j] = src.draws - before
        want = r + t * 50
        got, se = totals.mean(), _se(totals)
        assert abs(got - want) <= 3 * se, f"{fam}: {got:.1f} vs {want} (se {se:.2f})"
        details.append(f"{fam}: {got:.1f} ~ {want} ({abs(got - want) / se:.2f} se)")
    return "; ".join(details)


@_check("acceptance.a06_variance_bound", slow=True)
def _a06():
    gen = np.random.default_rng(606)
    t = 16  # variance only tightens as t grows, so small t is conservative
    draws = 100_000
    details = []
    for fam, params in (("uniform", None), ("zipf", {"s": 1.0})):
        for k in (4, 256, 4096):
            d = make_family(fam, k, params)
            probs = np.asarray(d.probs)
            idx = gen.choice(k, size=draws, p=probs)
            x = t + gen.negative_binomial(t, probs[idx])
            var = float(np.var(np.log2(x / t)))
            cap = VARIANCE_CONST * (math.log2(k) + 1.0) ** 2
            assert var <= cap, f"{fam} k={k}: var {var:.2f} > {cap:.2f}"
            details.append(f"{fam[:3]}{k}:{var:.1f}<{cap:.0f}")
    return "Var[log2(X/t)] within 4 (log2 k + 1)^2: " + " ".join(details)


@_check("acceptance.a07_cutoff_enclosure")
def _a07():
    t, k, eps = 16, 8, 0.1
    d = make_family("uniform", k)
    x_max = math.ceil(t * k / (eps * math.log(2.0)))
    policy = TruncationPolicy(tol=1e-12)
    parts = [expected_log_X_over_t(t, p, policy) for p in d.probs]
    h = sum(p * v.value for p, v in zip(d.probs, parts))
    slack = sum(p * v.enclosure for p, v in zip(d.probs, parts))
    ht = exact_H_tilde(d, t, x_max)
    diff = h - ht.value
    assert diff >= -(slack + ht.enclosure), f"H - H~ = {diff:e} below -enclosure"
    assert diff <= eps, f"H - H~ = {diff} > eps"
    return f"0 <= H - H~ <= {eps} (diff {diff:.2e} within enclosure {slack + ht.enclosure:.0e}); x_max={x_max}"


@_check("acceptance.a08_bucket_decomposition")
def _a08():
    detail = _total_expectation()
    d = make_family("uniform", 8)
    cfg = configure_buckets(8, 0.1, 16, rep_multiplier=0.001)
    rep = bucketed_H_estimate(SampleSource(d, 808), cfg)
    total = sum(row.q_hat for row in rep.per_bucket)
    assert total == 1, f"estimator weights sum to {total}"
    return detail + "; estimator weights sum to exactly 1"


@_check("acceptance.a09_end_to_end", slow=True)
def _a09():
    results = []
    for est, k, eps, trials in (("simple", 100, 0.1, 50), ("bucketed", 256, 0.15, 50)):
        cfg = ExperimentConfig(
            estimator=est, dist="zipf:s=1", k=k, eps=eps, trials=trials, seed=909
        )
        _, summary = run(cfg)
        frac = summary["success_within_eps"]
        assert frac is not None and frac >= 0.6, f"{est}: success {frac}"
        results.append(f"{est}(k={k},eps={eps}): {frac:.2f}")
    return "success fractions " + ", ".join(results) + " (threshold 0.6)"


@_check("acceptance.a10_sweep_scaling", slow=True)
def _a10():
    _, summary = sweep(
        ["bucketed", "abis"],
        [256],
        [0.4, 0.2, 0.1],
        dist="uniform",
        trials=3,
        seed=1010,
        overrides={"rep_multiplier": 0.02},
    )
    slopes = summary["inv_eps_exponent"]
    b = slopes["bucketed,k=256"]
    a = slopes["abis,k=256"]
    assert 1.6 <= b <= 2.6, f"bucketed exponent {b}"
    assert a - b >= 0.5, f"abis {a} vs bucketed {b}"
    return f"bucketed exponent {b:.2f} in [1.6, 2.6]; abis {a:.2f} (+{a - b:.2f})"


@_check("acceptance.a11_memory_audit", slow=True)
def _a11():
    rows, summary = audit_memory(eps=0.1)
    assert summary["streaming_registers_constant"], f"rows: {rows}"
    assert summary["plugin_state_grows"], f"rows: {rows}"
    regs = {est: wr for est, k, _, wr, _ in rows if est != "plugin"}
    return (
        "streaming registers constant over k=2..2^16 "
        f"({regs}); plug-in state grows with k"
    )


@_check("acceptance.a12_hard_pair_separation", slow=True)
def _a12():
    summary = entropy_gap_experiment(1000, 0.1, 200, seed=1212)
    assert summary.ci95_low > 0.0, f"gap CI [{summary.ci95_low}, {summary.ci95_high}]"
    return (
        f"mean gap {summary.mean_gap:.5f} bits, CI95 "
        f"[{summary.ci95_low:.5f}, {summary.ci95_high:.5f}] excludes 0; "
        f"separation frequency {summary.separation_frequency:.2f}"
    )


ACCEPTANCE_CHECKS = tuple(n for n in _CHECKS if n.startswith("acceptance."))
