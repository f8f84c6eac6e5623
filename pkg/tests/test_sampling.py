"""Stream semantics: accounting, scan outcomes, budgets, replay."""

import math

import numpy as np
import pytest

from conftest import CHI2_CRIT_999
from entrostream import rng
from entrostream.distribution import make_family
from entrostream.sampling import (
    BudgetGuard,
    ReplaySource,
    SampleSource,
    StreamExhausted,
    count_hits,
    draw_neg_binomial,
    fill_histogram,
    generate_symbols,
    guard_wrap,
    next_sample,
    observe_prefix_indicators,
)


class TestNextSample:
    def test_point_mass_always_same_symbol(self):
        d = make_family("two-point", 4, {"p": 1.0})
        src = SampleSource(d, 1)
        assert [next_sample(src) for _ in range(50)] == [0] * 50

    def test_reproducible_bit_sequence(self):
        d = make_family("uniform", 2)
        src = SampleSource(d, 0)
        got = [next_sample(src) for _ in range(24)]
        assert got == [0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1, 1, 1, 1, 1, 0, 1, 0, 0, 0, 0, 0, 1, 1]

    def test_increments_draws(self):
        src = SampleSource(make_family("uniform", 3), 5)
        for n in range(1, 20):
            next_sample(src)
            assert src.draws == n

    @pytest.mark.slow
    def test_zipf_goodness_of_fit(self):
        d = make_family("zipf", 100, {"s": 1.0}, 0)
        src = SampleSource(d, 77)
        n = 100_000
        counts = np.bincount(generate_symbols(src, n), minlength=100)
        expected = np.asarray(d.probs) * n
        stat = float(((counts - expected) ** 2 / expected).sum())
        assert stat < CHI2_CRIT_999[99], f"chi2 = {stat}"


class TestNegBinomialDraw:
    def test_certain_symbol_takes_exactly_t(self):
        d = make_family("two-point", 2, {"p": 1.0})
        src = SampleSource(d, 3)
        for t in (1, 5, 40):
            out = draw_neg_binomial(src, 0, t)
            assert out.completed and out.draws == t and out.hits == t

    def test_mean_matches_geometric(self):
        d = make_family("two-point", 2, {"p": 0.5})
        src = SampleSource(d, 11)
        n = 100_000
        total = sum(draw_neg_binomial(src, 0, 1).draws for _ in range(n))
        assert total / n == pytest.approx(2.0, rel=0.02)

    def test_exceeded_consumes_exactly_cap(self):
        d = make_family("zipf", 1000, {"s": 1.0})
        src = SampleSource(d, 9)
        before = src.draws
        out = draw_neg_binomial(src, 999, 50, cap=10)
        assert not out.completed
        assert out.draws == 10
        assert src.draws - before == 10

    def test_accounting_on_success(self):
        d = make_family("uniform", 6)
        src = SampleSource(d, 13)
        for _ in range(100):
            before = src.draws
            out = draw_neg_binomial(src, 2, 3)
            assert out.completed
            assert src.draws - before == out.draws

    def test_zero_probability_uncapped_rejected(self):
        d = make_family("two-point", 3, {"p": 1.0})  # symbol 2 has p = 0
        src = SampleSource(d, 1)
        with pytest.raises(ValueError):
            draw_neg_binomial(src, 2, 1)
        out = draw_neg_binomial(src, 2, 1, cap=25)  # capped is fine
        assert not out.completed and out.draws == 25

    def test_reproducibility(self):
        d = make_family("zipf", 30, {"s": 1.0})
        xs = []
        for _ in range(2):
            src = SampleSource(d, 21)
            xs.append([draw_neg_binomial(src, i % 30, 2).draws for i in range(40)])
        assert xs[0] == xs[1]


class TestPrefixIndicators:
    def test_certain_symbol_full_run(self):
        d = make_family("two-point", 2, {"p": 1.0})
        src = SampleSource(d, 2)
        assert observe_prefix_indicators(src, 0, 9) == 9

    def test_wrong_first_symbol_gives_zero(self):
        d = make_family("two-point", 2, {"p": 1.0})
        src = SampleSource(d, 2)
        assert observe_prefix_indicators(src, 1, 9) == 0

    def test_consumes_exactly_r(self):
        d = make_family("uniform", 4)
        src = SampleSource(d, 8)
        for r in (1, 3, 12):
            before = src.draws
            c = observe_prefix_indicators(src, 1, r)
            assert src.draws - before == r
            assert 0 <= c <= r

    @pytest.mark.slow
    def test_indicator_means_are_powers(self):
        # E[B_j] = p^j: the prefix length is >= j with probability p^j.
        p, trials = 0.4, 1_000_000
        d = make_family("two-point", 2, {"p": p})
        src = SampleSource(d, 14)
        counts = np.zeros(4, dtype=np.int64)
        for _ in range(trials):
            c = observe_prefix_indicators(src, 0, 3)
            counts[c] += 1
        ge = np.cumsum(counts[::-1])[::-1]  # trials with prefix >= j
        for j in (1, 2, 3):
            mean = ge[j] / trials
            se = math.sqrt(p**j * (1 - p**j) / trials)
            assert abs(mean - p**j) <= 3 * se, f"j={j}: {mean} vs {p**j}"


class TestBudget:
    def test_zero_budget_fails_immediately(self):
        d = make_family("uniform", 2)
        src = SampleSource(d, 1)
        out = guard_wrap(BudgetGuard(max_draws=0), src, lambda: next_sample(src))
        assert out.failed and out.draws_consumed == 0 and src.draws == 0

    def test_budget_exceeded_reports_consumed(self):
        d = make_family("zipf", 50, {"s": 1.0})
        src = SampleSource(d, 4)
        guard = BudgetGuard(max_draws=37)
        out = guard_wrap(guard, src, lambda: draw_neg_binomial(src, 49, 1000))
        assert out.failed and guard.tripped
        assert out.draws_consumed == 37 == src.draws

    def test_completion_within_budget_is_clean(self):
        d = make_family("two-point", 2, {"p": 1.0})
        src = SampleSource(d, 1)
        out = guard_wrap(BudgetGuard(max_draws=10), src, lambda: draw_neg_binomial(src, 0, 10))
        assert not out.failed and out.result.draws == 10

    def test_budget_detached_after_wrap(self):
        d = make_family("uniform", 2)
        src = SampleSource(d, 1)
        guard_wrap(BudgetGuard(max_draws=5), src, lambda: next_sample(src))
        assert src.budget is None
        next_sample(src)  # no budget in force anymore


class TestReplay:
    def test_roundtrip_from_file(self, tmp_path):
        d = make_family("zipf", 12, {"s": 1.0})
        src = SampleSource(d, 6)
        syms = generate_symbols(src, 500)
        path = tmp_path / "stream.txt"
        path.write_text("".join(f"{s + 1}\n" for s in syms))  # 1-based on disk
        rep = ReplaySource.from_file(str(path), k=12)
        assert list(generate_symbols(rep, 500)) == list(syms)

    def test_estimator_ops_match_prng_source(self, tmp_path):
        d = make_family("zipf", 12, {"s": 1.0})
        live = SampleSource(d, 6)
        syms = generate_symbols(live, 4000)
        rep = ReplaySource(syms, k=12)
        live2 = SampleSource(d, 6)
        for i in (0, 3, 11):
            assert draw_neg_binomial(rep, i, 2, cap=300) == draw_neg_binomial(
                live2, i, 2, cap=300
            )
            assert observe_prefix_indicators(rep, i, 5) == observe_prefix_indicators(
                live2, i, 5
            )
            assert count_hits(rep, i, 100) == count_hits(live2, i, 100)

    def test_exhaustion_raises(self):
        rep = ReplaySource(np.array([0, 1, 0], dtype=np.int32), k=2)
        with pytest.raises(StreamExhausted):
            count_hits(rep, 0, 10)

    def test_one_based_validation(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0\n1\n")
        with pytest.raises(ValueError):
            ReplaySource.from_file(str(path))


class TestHistogram:
    def test_counts_sum_to_n(self):
        d = make_family("dirichlet-random", 20, seed=2)
        src = SampleSource(d, 3)
        counts = fill_histogram(src, 5000)
        assert counts.sum() == 5000 == src.draws


@pytest.mark.slow
def test_fact_mean_draws_with_symbol():
    """Mean draws of (one symbol draw, then scan to t hits) is 1 + t k."""
    t, reps, k = 16, 10_000, 50
    for fam, params in (("uniform", None), ("zipf", {"s": 1.0})):
        d = make_family(fam, k, params)
        src = SampleSource(d, 71)
        totals = np.empty(reps)
        for j in range(reps):
            before = src.draws
            i = next_sample(src)
            draw_neg_binomial(src, i, t)
            totals[j] = src.draws - before
        se = totals.std(ddof=1) / math.sqrt(reps)
        assert abs(totals.mean() - (1 + t * k)) <= 3 * se, fam
