"""Entropy estimation pipelines over a sample stream.

Two constant-memory pipelines:

* simple: average, over m fresh symbols i ~ D, of the corrected log
  estimator log2(X/t) - g(prefix indicators), where X counts the draws
  until i has appeared t times.
* bucketed: estimate E[log2(X'/t)] (X' capped at x_max) by splitting the
  range of X into intervals, estimating each interval's probability and
  conditional mean with its own repetition budget and early-terminated
  scans, then subtract an independently estimated mean correction.

Plus two baselines: the one-smoothed counting estimator (higher sample
cost, same memory) and the full-histogram plug-in (memory grows with k).

Working state of each pipeline lives in an explicitly declared
RegisterFile so the constant-memory claim is auditable: the register
count is independent of the alphabet size, while program constants
(correction coefficients, bucket boundaries) are accounted separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

from .correction import CorrectionPolynomial, build_correction
from .sampling import (
    BudgetGuard,
    count_hits,
    draw_neg_binomial,
    fill_histogram,
    guard_wrap,
    next_sample,
    observe_prefix_indicators,
)


class RegisterFile:
    """A fixed, named set of scalar working registers.

    Estimators declare every piece of mutable scalar state here, up
    front.  The audit then reports ``count`` as the working-memory
    footprint in words; creating a register after construction is a bug.
    """

    __slots__ = ("_slots",)

    def __init__(self, names):
        self._slots = dict.fromkeys(names, 0)

    def __getitem__(self, name):
        return self._slots[name]

    def __setitem__(self, name, value):
        if name not in self._slots:
            raise KeyError(f"register {name!r} was not declared")
        self._slots[name] = value

    @property
    def count(self) -> int:
        return len(self._slots)


class BucketRow(NamedTuple):
    """Per-interval diagnostics emitted by the bucketed pipeline.

    q_hat is exact (a Fraction), so the reported weights sum to exactly 1;
    the running estimate itself uses float registers.
    """

    q_hat: Fraction
    h_hat: float
    c: int
    reps: int


@dataclass
class EstimateReport:
    estimate: float
    samples_used: int
    failed: bool
    seed: int
    working_registers: int
    program_constants: int
    per_bucket: Optional[list] = None


@dataclass(frozen=True)
class SimpleConfig:
    """Frozen defaults for the simple pipeline at accuracy eps.

    r = ceil(log2(1/eps)) (at least 1), t = 4 r^2, and the repetition
    count m = ceil(12 (log2 k + 2)^2 / eps^2) is sized so Chebyshev on the
    estimator's variance clears the 2/3 success target with margin.  The
    draw budget is budget_factor times the expected total cost
    m (1 + r + t k); by Markov a factor-b budget fails with probability
    at most 1/b.
    """

    k: int
    eps: float
    r: int
    t: int
    m: int
    budget_factor: float = 10.0

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if self.t < 4 * self.r * self.r:
            raise ValueError("t must be at least 4 r^2")
        if self.m < 1:
            raise ValueError("need at least one repetition")

    @classmethod
    def from_k_eps(cls, k, eps, r=None, t=None, m=None, budget_factor=10.0):
        if r is None:
            r = max(1, math.ceil(math.log2(1.0 / eps)))
        if t is None:
            t = 4 * r * r
        if m is None:
            m = math.ceil(12.0 * (math.log2(k) + 2.0) ** 2 / eps**2)
        return cls(k=k, eps=eps, r=r, t=t, m=m, budget_factor=budget_factor)

    def expected_draws(self) -> int:
        return math.ceil(self.m * (1 + self.r + self.t * self.k))


def default_r(eps: float) -> int:
    return max(1, math.ceil(math.log2(1.0 / eps)))


def default_t(eps: float) -> int:
    r = default_r(eps)
    return 4 * r * r


def log_star(k: int) -> int:
    """Iterated-log count: base-2 logs applied to k until the value is <= 1."""
    if k < 1:
        raise ValueError("alphabet size must be positive")
    count = 0
    v = float(k)
    while v > 1.0:
        v = math.log2(v)
        count += 1
    return count


def _log_tower(k: int, depth: int):
    """The first `depth` iterated logs of k: log2 k, log2 log2 k, ..."""
    out = []
    v = float(k)
    for _ in range(depth):
        v = math.log2(v)
        out.append(v)
    return out


@dataclass(frozen=True)
class BucketConfig:
    """Interval layout and repetition budgets for the bucketed pipeline.

    breakpoints[0] = t, breakpoints[-1] = x_max, strictly increasing;
    interval l (1-based) is [breakpoints[l-1], breakpoints[l]), the last
    closed at x_max.  reps[l-1] scans are spent on interval l, each capped
    at breakpoints[l] draws.
    """

    t: int
    breakpoints: tuple
    reps: tuple
    x_max: int
    correction_reps: int

    def __post_init__(self):
        bps = self.breakpoints
        if len(bps) < 2 or len(self.reps) != len(bps) - 1:
            raise ValueError("need one repetition budget per interval")
        if bps[0] != self.t or bps[-1] != self.x_max:
            raise ValueError("breakpoints must run from t to x_max")
        if any(b >= c for b, c in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(r < 1 for r in self.reps):
            raise ValueError("repetition budgets must be positive")

    @property
    def num_buckets(self) -> int:
        return len(self.breakpoints) - 1

    def expected_draws(self, k: int) -> int:
        """Budget-sizing upper bound on the expected draw count."""
        total = 0
        for ell in range(self.num_buckets - 1):
            total += self.reps[ell] * (1 + self.breakpoints[ell + 1])
        total += self.reps[-1] * (1 + min(self.t * k, self.x_max))
        return total

    def program_constant_words(self) -> int:
        return len(self.breakpoints) + len(self.reps) + 3  # + t, x_max, reps


def configure_buckets(
    k: int,
    eps: float,
    t: int,
    rep_multiplier: float = 1.0,
    correction_reps: int | None = None,
) -> BucketConfig:
    """Interval boundaries and repetition counts for alphabet size k.

    With L = log*(k), boundary l (l < L) sits at t k / (log^(l) k)^4,
    rounded and clamped upward to keep the intervals non-empty; clamped
    boundaries that reach the cap are dropped.  The cap is
    x_max = ceil(t k / (eps ln 2)), which makes the truncation error of
    the capped mean provably at most eps.  Interval l gets
    log2^2(x_max / b_(l-1)) * log^(l)(k) / eps^2 scans (times an optional
    multiplier), so coarse cheap intervals absorb more repetitions.
    """
    if k < 2:
        raise ValueError("bucketed estimation needs an alphabet of size >= 2")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if rep_multiplier <= 0.0:
        raise ValueError("repetition multiplier must be positive")
    depth = log_star(k)
    tower = _log_tower(k, depth)
    x_max = math.ceil(t * k / (eps * math.log(2.0)))
    bps = [t]
    towers = []  # tower value attached to each kept interval
    for ell in range(1, depth):
        raw = t * k / tower[ell - 1] ** 4
        b = max(bps[-1] + 1, round(raw))
        if b >= x_max:
            break
        bps.append(b)
        towers.append(tower[ell - 1])
    bps.append(x_max)
    towers.append(tower[depth - 1])  # the final interval's tower value is <= 1
    reps = []
    for ell in range(len(bps) - 1):
        width = math.log2(x_max / bps[ell]) ** 2
        reps.append(max(1, math.ceil(rep_multiplier * width * towers[ell] / eps**2)))
    if correction_reps is None:
        correction_reps = math.ceil(12.0 / eps**2)
    return BucketConfig(
        t=t,
        breakpoints=tuple(bps),
        reps=tuple(reps),
        x_max=x_max,
        correction_reps=correction_reps,
    )


def log_estimator_once(src, i: int, t: int, r: int, corr: CorrectionPolynomial) -> float:
    """One corrected estimate of log2(1/p_i): log2(X/t) - g(prefix).

    Consumes X + r samples.  For p_i = 1 the result is exactly 0: X = t,
    the full prefix matches, and the coefficients of g sum to zero.
    """
    if corr.t != t or corr.r != r:
        raise ValueError("correction polynomial was built for different (t, r)")
    out = draw_neg_binomial(src, i, t)
    prefix = observe_prefix_indicators(src, i, r)
    return math.log2(out.draws / t) - corr.prefix_table[prefix]


_SIMPLE_REGISTERS = ("reps_done", "eta_sum", "symbol", "nb_draws", "prefix_len")


def simple_entropy_estimate(
    src, cfg: SimpleConfig, corr: CorrectionPolynomial | None = None
) -> EstimateReport:
    """Mean of m corrected log estimates at freshly drawn symbols.

    Success-probability contract: the mean lands within +-eps of the
    entropy with probability at least 2/3 under the default constants.
    A tripped draw budget yields a Fail report, not an exception.
    """
    if corr is None:
        corr = _corr_cached(cfg.t, cfg.r)
    regs = RegisterFile(_SIMPLE_REGISTERS)
    guard = BudgetGuard(max_draws=math.ceil(cfg.budget_factor * cfg.expected_draws()))
    start = src.draws

    def work():
        while regs["reps_done"] < cfg.m:
            regs["symbol"] = next_sample(src)
            nb = draw_neg_binomial(src, regs["symbol"], cfg.t)
            regs["nb_draws"] = nb.draws
            regs["prefix_len"] = observe_prefix_indicators(src, regs["symbol"], cfg.r)
            regs["eta_sum"] += math.log2(regs["nb_draws"] / cfg.t) - corr.prefix_table[
                regs["prefix_len"]
            ]
            regs["reps_done"] += 1
        return regs["eta_sum"] / cfg.m

    outcome = guard_wrap(guard, src, work)
    return EstimateReport(
        estimate=outcome.result if not outcome.failed else math.nan,
        samples_used=src.draws - start,
        failed=outcome.failed,
        seed=src.seed,
        working_registers=regs.count,
        program_constants=len(corr.prefix_table) + 3,  # + t, r, m
    )


_BUCKET_REGISTERS = (
    "bucket",
    "rep",
    "hits_in_bucket",
    "bucket_log_sum",
    "qhat_running",
    "estimate_acc",
    "symbol",
    "scan_draws",
)


def bucketed_H_estimate(src, cfg: BucketConfig, seed: int | None = None) -> EstimateReport:
    """Estimate E[log2(X'/t)] by per-interval scans with early termination.

    For each interval: repeatedly draw a symbol, scan for its t-th
    occurrence but stop at the interval's right boundary (beyond it the
    value cannot land inside), clamp at x_max, and accumulate log2(X'/t)
    when X' falls in the interval.  Empty intervals fall back to the
    boundary value log2(b_l / t).  The last interval's weight is defined
    as one minus the others, so reported weights sum to exactly 1.
    """
    regs = RegisterFile(_BUCKET_REGISTERS)
    start = src.draws
    rows = []  # diagnostics sink, not estimator state
    nb_buckets = cfg.num_buckets

    def work():
        regs["qhat_running"] = Fraction(0)
        for ell in range(1, nb_buckets + 1):
            regs["bucket"] = ell
            lo = cfg.breakpoints[ell - 1]
            hi = cfg.breakpoints[ell]
            last = ell == nb_buckets
            reps = cfg.reps[ell - 1]
            regs["hits_in_bucket"] = 0
            regs["bucket_log_sum"] = 0.0
            regs["rep"] = 0
            while regs["rep"] < reps:
                regs["symbol"] = next_sample(src)
                scan = draw_neg_binomial(src, regs["symbol"], cfg.t, cap=hi)
                if scan.completed:
                    x_prime = min(scan.draws, cfg.x_max)
                elif last:
                    x_prime = cfg.x_max  # ran past the cap: clamps to x_max
                else:
                    x_prime = None  # ran past b_l: not in this interval
                if x_prime is not None and (lo <= x_prime < hi or (last and x_prime == hi)):
                    regs["hits_in_bucket"] += 1
                    regs["bucket_log_sum"] += math.log2(x_prime / cfg.t)
                regs["rep"] += 1
            c = regs["hits_in_bucket"]
            h_hat = regs["bucket_log_sum"] / c if c else math.log2(hi / cfg.t)
            if last:
                q_hat = Fraction(1) - regs["qhat_running"]
            else:
                q_hat = Fraction(c, reps)
                regs["qhat_running"] += q_hat
            regs["estimate_acc"] += float(q_hat) * h_hat
            rows.append(BucketRow(q_hat=q_hat, h_hat=h_hat, c=c, reps=reps))
        return regs["estimate_acc"]

    guard = BudgetGuard(max_draws=_bucket_budget(src, cfg))
    outcome = guard_wrap(guard, src, work)
    return EstimateReport(
        estimate=outcome.result if not outcome.failed else math.nan,
        samples_used=src.draws - start,
        failed=outcome.failed,
        seed=seed if seed is not None else src.seed,
        working_registers=regs.count,
        program_constants=cfg.program_constant_words(),
        per_bucket=rows,
    )


def _bucket_budget(src, cfg, budget_factor: float = 10.0) -> int:
    k = src.k
    return math.ceil(budget_factor * cfg.expected_draws(k))


_CORRECTION_REGISTERS = ("rep", "z_sum", "symbol", "prefix_len")


def correction_average(src, t, r, reps, corr: CorrectionPolynomial) -> float:
    """Mean of g over fresh prefix observations: unbiased for E_i[h_t(p_i)].

    Each repetition draws one symbol plus r indicator samples; variance is
    at most (max |g|)^2 / reps since g is bounded on indicator patterns.
    """
    if reps < 1:
        raise ValueError("need at least one repetition")
    regs = RegisterFile(_CORRECTION_REGISTERS)
    while regs["rep"] < reps:
        regs["symbol"] = next_sample(src)
        regs["prefix_len"] = observe_prefix_indicators(src, regs["symbol"], r)
        regs["z_sum"] += corr.prefix_table[regs["prefix_len"]]
        regs["rep"] += 1
    return regs["z_sum"] / reps


def bucketed_entropy_estimate(
    src,
    k: int,
    eps: float,
    rep_multiplier: float = 1.0,
    r: int | None = None,
    t: int | None = None,
    correction_reps: int | None = None,
) -> EstimateReport:
    """Full bucketed pipeline: capped log-mean estimate minus mean correction."""
    if r is None:
        r = default_r(eps)
    if t is None:
        t = 4 * r * r
    corr = _corr_cached(t, r)
    cfg = configure_buckets(k, eps, t, rep_multiplier, correction_reps)
    base = bucketed_H_estimate(src, cfg)
    if base.failed:
        return base
    start = src.draws
    zbar = correction_average(src, t, r, cfg.correction_reps, corr)
    return EstimateReport(
        estimate=base.estimate - zbar,
        samples_used=base.samples_used + (src.draws - start),
        failed=False,
        seed=src.seed,
        working_registers=base.working_registers + len(_CORRECTION_REGISTERS),
        program_constants=base.program_constants + len(corr.prefix_table),
        per_bucket=base.per_bucket,
    )


def baseline_abis_once(src, i: int, n: int) -> float:
    """One-smoothed counting estimate of log2(1/p_i) from n fresh draws.

    The +1 in log2(n / (hits + 1)) keeps the estimate finite when the
    symbol never shows up, at the price of extra bias; driving that bias
    below eps is what forces this baseline's higher sample cost.
    """
    if n < 1:
        raise ValueError("need at least one draw")
    hits = count_hits(src, i, n)
    return math.log2(n / (hits + 1))


_ABIS_REGISTERS = ("reps_done", "sum_est", "symbol", "hits")


def abis_entropy_estimate(
    src, cfg: SimpleConfig, per_rep_draws: int | None = None, cost_const: float = 1.0
) -> EstimateReport:
    """Counting-baseline pipeline: m one-smoothed estimates, averaged.

    Each repetition spends ceil(cost_const * t * k / eps) draws counting
    one symbol's occurrences, for a total sample cost cubic in 1/eps.
    """
    n = per_rep_draws or math.ceil(cost_const * cfg.t * cfg.k / cfg.eps)
    regs = RegisterFile(_ABIS_REGISTERS)
    guard = BudgetGuard(
        max_draws=math.ceil(cfg.budget_factor * cfg.m * (1 + n))
    )
    start = src.draws

    def work():
        while regs["reps_done"] < cfg.m:
            regs["symbol"] = next_sample(src)
            regs["hits"] = count_hits(src, regs["symbol"], n)
            regs["sum_est"] += math.log2(n / (regs["hits"] + 1))
            regs["reps_done"] += 1
        return regs["sum_est"] / cfg.m

    outcome = guard_wrap(guard, src, work)
    return EstimateReport(
        estimate=outcome.result if not outcome.failed else math.nan,
        samples_used=src.draws - start,
        failed=outcome.failed,
        seed=src.seed,
        working_registers=regs.count,
        program_constants=3,  # n, m, and the smoothing offset
    )


def plugin_entropy(src, n: int) -> float:
    """Plug-in entropy of the empirical histogram of n draws.

    The full-memory reference point: state grows with the alphabet, which
    is exactly what the streaming pipelines avoid.
    """
    if n < 1:
        raise ValueError("need at least one draw")
    counts = fill_histogram(src, n)
    h = 0.0
    for c in counts:
        if c:
            h -= (c / n) * math.log2(c / n)
    return h


def plugin_entropy_report(src, n: int) -> EstimateReport:
    start = src.draws
    est = plugin_entropy(src, n)
    return EstimateReport(
        estimate=est,
        samples_used=src.draws - start,
        failed=False,
        seed=src.seed,
        working_registers=src.k + 2,  # histogram cells + draw/entropy scalars
        program_constants=1,
    )


_CORR_CACHE: dict = {}


def _corr_cached(t: int, r: int) -> CorrectionPolynomial:
    key = (t, r)
    if key not in _CORR_CACHE:
        _CORR_CACHE[key] = build_correction(t, r, base="bits")
    return _CORR_CACHE[key]
