"""Seeded sample streams with exact draw accounting.

A SampleSource emits the i.i.d. symbol stream determined by (dist, seed);
its ``draws`` counter both counts consumed samples and addresses the
counter-based generator, so accounting is exact by construction.  A
ReplaySource serves the same operations from a recorded symbol buffer.

Budget enforcement: a BudgetGuard attached to a source caps cumulative
draws.  Work that would exceed the cap stops at the boundary and raises
BudgetExceeded; ``guard_wrap`` converts that into a structured Fail
outcome instead of a crash.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import rng
from .backends import kernels
from .distribution import DiscreteDistribution

_UNCAPPED = 1 << 62


class StreamExhausted(RuntimeError):
    """A replayed stream ran out of symbols mid-operation."""


class BudgetExceeded(RuntimeError):
    def __init__(self, draws_consumed: int):
        super().__init__(f"sampling budget exhausted after {draws_consumed} draws")
        self.draws_consumed = draws_consumed


@dataclass
class BudgetGuard:
    """Hard cap on cumulative draws, sized as a multiple of the expectation.

    Overshoot probability is then controlled by Markov's inequality: a
    factor-b budget fails with probability at most 1/b.
    """

    max_draws: int
    tripped: bool = False


class GuardOutcome(NamedTuple):
    failed: bool
    result: object  # None when failed
    draws_consumed: int


class NegBinomialOutcome(NamedTuple):
    """Result of scanning for the t-th occurrence of a symbol.

    completed: the t-th hit arrived within the cap; draws is then the
    sample count X (the hit's 1-based position).  Otherwise exactly
    ``cap`` draws were consumed and hits < t.
    """

    completed: bool
    draws: int
    hits: int


class SampleSource:
    """Pseudorandom i.i.d. stream over dist, single-owner, draw-counted."""

    def __init__(self, dist: DiscreteDistribution, seed: int):
        self.dist = dist
        self.seed = seed
        self.key = rng.derive_key(seed, rng.PHASE_STREAM)
        self.draws = 0
        self.budget: Optional[BudgetGuard] = None
        self._budget_start = 0

    def attach_budget(self, guard: BudgetGuard):
        self.budget = guard
        self._budget_start = self.draws

    def detach_budget(self):
        self.budget = None

    def allowance(self) -> Optional[int]:
        if self.budget is None:
            return None
        used = self.draws - self._budget_start
        return max(0, self.budget.max_draws - used)

    # Backend plumbing shared with ReplaySource via duck typing.

    def _scan_until_hits(self, target, hits_needed, cap, hint):
        return kernels.scan_until_hits(
            self.dist.table, self.key, self.draws, target, hits_needed, cap, hint
        )

    def _prefix_run(self, target, n):
        return kernels.prefix_run_length(self.dist.table, self.key, self.draws, target, n)

    def _count_hits(self, target, n):
        return kernels.count_hits(self.dist.table, self.key, self.draws, target, n)

    def _fill_histogram(self, n, out):
        return kernels.fill_histogram(self.dist.table, self.key, self.draws, n, out)

    def _generate(self, n):
        return kernels.generate(self.dist.table, self.key, self.draws, n)

    def _available(self):
        return _UNCAPPED

    @property
    def k(self):
        return self.dist.k

    def prob_of(self, symbol):
        return self.dist.probs[symbol]


class ReplaySource:
    """Stream replayed from a recorded buffer of 0-based symbols."""

    def __init__(self, symbols: np.ndarray, k: int, seed: int = 0):
        self.symbols = np.ascontiguousarray(symbols, dtype=np.int32)
        if self.symbols.size and (self.symbols.min() < 0 or self.symbols.max() >= k):
            raise ValueError("replay symbols out of range for alphabet size")
        self.dist = None
        self.k = k
        self.seed = seed
        self.draws = 0
        self.budget: Optional[BudgetGuard] = None
        self._budget_start = 0

    attach_budget = SampleSource.attach_budget
    detach_budget = SampleSource.detach_budget
    allowance = SampleSource.allowance

    @classmethod
    def from_file(cls, path: str, k: int | None = None):
        """Load newline-delimited decimal 1-based symbol indices."""
        data = np.loadtxt(path, dtype=np.int64, ndmin=1)
        if data.size and data.min() < 1:
            raise ValueError("replay files are 1-based; found an index < 1")
        symbols = (data - 1).astype(np.int32)
        if k is None:
            k = int(symbols.max()) + 1 if symbols.size else 1
        return cls(symbols, k)

    def _scan_until_hits(self, target, hits_needed, cap, hint):
        return kernels.scan_until_hits_arr(self.symbols, self.draws, target, hits_needed, cap)

    def _prefix_run(self, target, n):
        return kernels.prefix_run_length_arr(self.symbols, self.draws, target, n)

    def _count_hits(self, target, n):
        return kernels.count_hits_arr(self.symbols, self.draws, target, n)

    def _fill_histogram(self, n, out):
        return kernels.fill_histogram_arr(self.symbols, self.draws, n, out)

    def _generate(self, n):
        return self.symbols[self.draws : self.draws + n].copy()

    def _available(self):
        return self.symbols.shape[0] - self.draws

    def prob_of(self, symbol):
        return None  # unknown for recorded streams


def _effective_limit(src, requested):
    """Smallest of: requested cap, budget allowance, stream length."""
    limit = min(requested, src._available())
    allowance = src.allowance()
    if allowance is not None:
        limit = min(limit, allowance)
    return limit


def _post_scan(src, requested, consumed, completed):
    """Account for consumed draws, then classify a short scan:
    completion / logical cap are fine; otherwise budget trip or exhaustion."""
    src.draws += consumed
    if completed or consumed == requested:
        return
    if src.allowance() == 0:
        raise BudgetExceeded(consumed)
    raise StreamExhausted(f"stream ended after {consumed} draws mid-operation")


def next_sample(src) -> int:
    """Draw one symbol; marginal law is src.dist (scalar fast path)."""
    if _effective_limit(src, 1) < 1:
        _post_scan(src, 1, 0, False)
    if isinstance(src, ReplaySource):
        sym = int(src.symbols[src.draws])
    else:
        tab = src.dist.table
        u = rng.u01(src.key, src.draws)
        if tab.kind == 0:
            sym = int(np.searchsorted(tab.fvals, u, side="right"))
        else:
            x = u * tab.k
            j = min(int(x), tab.k - 1)
            sym = j if (x - j) < tab.fvals[j] else int(tab.ivals[j])
    src.draws += 1
    return sym


def draw_neg_binomial(src, i: int, t: int, cap: int | None = None) -> NegBinomialOutcome:
    """Draw until symbol i appears t times, or until ``cap`` draws.

    On completion the consumed count X follows NB(t, p_i) with support
    starting at t.  An Exceeded outcome consumes exactly cap draws (the
    scan never peeks past the cap).  Uncapped draws from a symbol of zero
    probability are rejected up front: they would never terminate.
    """
    if t < 1:
        raise ValueError("need a positive target hit count")
    p = src.prob_of(i)
    if cap is None and src.allowance() is None and p is not None and p <= 0.0:
        raise ValueError("uncapped scan for a zero-probability symbol")
    requested = _UNCAPPED if cap is None else int(cap)
    limit = _effective_limit(src, requested)
    hint = int(1.25 * t / p) + 64 if p else 4096
    consumed, hits = src._scan_until_hits(i, t, limit, min(hint, limit))
    completed = hits >= t
    _post_scan(src, requested, consumed, completed)
    return NegBinomialOutcome(completed=completed, draws=consumed, hits=hits)


def observe_prefix_indicators(src, i: int, r: int) -> int:
    """Draw exactly r samples; return the largest c with samples 1..c == i.

    The implied indicator variables are B_j = 1 iff j <= c, encoding all r
    prefix indicators in a single counter.
    """
    if r < 1:
        raise ValueError("need a positive indicator count")
    limit = _effective_limit(src, r)
    run = src._prefix_run(i, min(limit, r))
    _post_scan(src, r, limit, limit == r)
    return min(run, r)


def count_hits(src, i: int, n: int) -> int:
    """Draw exactly n samples; count occurrences of symbol i."""
    limit = _effective_limit(src, n)
    hits = src._count_hits(i, min(limit, n))
    _post_scan(src, n, limit, limit == n)
    return hits


def fill_histogram(src, n: int, out=None):
    """Draw exactly n samples into a full histogram (unbounded-memory path)."""
    if out is None:
        out = np.zeros(src.k, dtype=np.int64)
    limit = _effective_limit(src, n)
    src._fill_histogram(min(limit, n), out)
    _post_scan(src, n, limit, limit == n)
    return out


def generate_symbols(src, n: int) -> np.ndarray:
    """Materialize the next n symbols (stream export / diagnostics)."""
    limit = _effective_limit(src, n)
    out = src._generate(min(limit, n))
    _post_scan(src, n, limit, limit == n)
    return out


def guard_wrap(guard: BudgetGuard, src, work) -> GuardOutcome:
    """Run ``work()`` under ``guard`` on ``src``; trip to Fail, never crash."""
    src.attach_budget(guard)
    start = src.draws
    try:
        result = work()
    except BudgetExceeded:
        guard.tripped = True
        return GuardOutcome(failed=True, result=None, draws_consumed=src.draws - start)
    finally:
        src.detach_budget()
    return GuardOutcome(failed=False, result=result, draws_consumed=src.draws - start)
