"""Oracle soundness: pmf values, certified truncation, decompositions."""

import math

import pytest

from entrostream.correction import build_correction
from entrostream.distribution import DiscreteDistribution, make_family
from entrostream.estimators import configure_buckets
from entrostream.oracle import (
    TruncationPolicy,
    exact_H_tilde,
    exact_bucket_stats,
    expected_eta,
    expected_log_X_over_t,
    nb_pmf,
)


class TestPmf:
    def test_support_start(self):
        assert nb_pmf(5, 0.3, 5) == pytest.approx(0.3**5, rel=1e-12)
        assert nb_pmf(5, 0.3, 4) == 0.0

    def test_geometric_special_case(self):
        for x in range(1, 20):
            assert nb_pmf(1, 0.25, x) == pytest.approx(0.25 * 0.75 ** (x - 1), rel=1e-12)

    def test_certain_hit(self):
        assert nb_pmf(3, 1.0, 3) == 1.0
        assert nb_pmf(3, 1.0, 4) == 0.0

    def test_mass_close_to_one(self):
        total = sum(nb_pmf(16, 0.3, x) for x in range(16, 800))
        assert total >= 1 - 2e-10

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            nb_pmf(0, 0.5, 3)
        with pytest.raises(ValueError):
            nb_pmf(2, 0.0, 3)


class TestExpectedLog:
    def test_certain_hit_is_zero(self):
        assert expected_log_X_over_t(7, 1.0) == (0.0, 0.0)

    def test_geometric_half_value(self):
        # sum over x >= 1 of 2^-x log2(x)
        v = expected_log_X_over_t(1, 0.5)
        assert v.value == pytest.approx(0.7326494820411309, abs=1e-9)
        assert v.enclosure < 1e-9

    def test_jensen_upper_bound(self):
        for p in (0.1, 0.5, 0.9):
            for t in (4, 64):
                v = expected_log_X_over_t(t, p)
                assert v.value <= math.log2(1 / p) + 1e-9

    def test_tolerance_steers_enclosure(self):
        loose = expected_log_X_over_t(16, 0.3, TruncationPolicy(tol=1e-2))
        tight = expected_log_X_over_t(16, 0.3, TruncationPolicy(tol=1e-12))
        assert loose.enclosure > tight.enclosure
        assert abs(loose.value - tight.value) <= loose.enclosure

    def test_hard_cap_reports_wide_enclosure(self):
        capped = expected_log_X_over_t(16, 0.3, TruncationPolicy(tol=1e-30, hard_cap=60))
        assert capped.enclosure > 1e-6  # warning-sized, not silently tight


class TestExpectedEta:
    def test_point_mass(self):
        corr = build_correction(16, 2)
        assert expected_eta(16, 2, 1.0, corr).value == 0.0

    def test_assembles_from_parts(self):
        corr = build_correction(16, 2)
        base = expected_log_X_over_t(16, 0.3).value
        # h_16(rho) = -(1-rho)/(2t) in natural log; bits scale 1/ln 2
        want = base + (1 - 0.3) / (32 * math.log(2))
        assert expected_eta(16, 2, 0.3, corr).value == pytest.approx(want, abs=1e-12)

    def test_mismatched_parameters_rejected(self):
        corr = build_correction(16, 2)
        with pytest.raises(ValueError):
            expected_eta(64, 2, 0.3, corr)

    def test_bias_shrinks_along_grid(self):
        p = 0.3
        biases = []
        for r in (2, 4, 6, 8):
            t = 4 * r * r
            corr = build_correction(t, r)
            ev = expected_eta(t, r, p, corr)
            biases.append(abs(ev.value - math.log2(1 / p)))
        assert all(b2 < b1 for b1, b2 in zip(biases, biases[1:])), biases


class TestHTilde:
    def test_point_mass_zero(self):
        d = DiscreteDistribution(k=2, probs=(1.0, 0.0))
        assert exact_H_tilde(d, 16, 1000).value == 0.0

    def test_cap_below_everything_else(self):
        d = make_family("uniform", 4)
        # cap at the support start: X' = t always, so the mean is 0
        assert exact_H_tilde(d, 8, 8).value == 0.0

    def test_truncation_only_lowers(self):
        d = make_family("zipf", 8, {"s": 1.0})
        t = 16
        h = sum(
            p * expected_log_X_over_t(t, p).value for p in d.probs if p > 0
        )
        for x_max in (40, 200, 5000):
            assert h - exact_H_tilde(d, t, x_max).value >= -1e-9

    def test_monotone_in_cap(self):
        d = make_family("uniform", 4)
        vals = [exact_H_tilde(d, 8, xm).value for xm in (16, 64, 256, 2048)]
        assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


class TestBucketStats:
    def test_single_bucket_collapses(self):
        d = make_family("uniform", 4)
        cfg = configure_buckets(2, 0.5, 16)  # k=2 has a single interval
        # rebuild stats against this 1-interval layout but the k=4 mixture
        stats = exact_bucket_stats(d, cfg)
        assert len(stats) == cfg.num_buckets == 1
        assert stats[0].q == pytest.approx(1.0, abs=1e-12)
        assert stats[0].h == pytest.approx(
            exact_H_tilde(d, 16, cfg.x_max).value, abs=1e-9
        )

    def test_point_mass_first_bucket_only(self):
        d = DiscreteDistribution(k=2, probs=(1.0, 0.0))
        cfg = configure_buckets(8, 0.2, 16)
        stats = exact_bucket_stats(d, cfg)
        assert stats[0].q == pytest.approx(1.0, abs=1e-12)
        assert all(s.q == 0.0 for s in stats[1:])
        assert all(s.zero_mass for s in stats[1:])

    def test_total_expectation(self):
        d = make_family("uniform", 8)
        cfg = configure_buckets(8, 0.1, 16)
        stats = exact_bucket_stats(d, cfg)
        combined = sum(s.q * s.h for s in stats)
        assert combined == pytest.approx(
            exact_H_tilde(d, 16, cfg.x_max).value, abs=1e-9
        )
        assert sum(s.q for s in stats) == pytest.approx(1.0, abs=1e-12)

    def test_zero_mass_fallback_value(self):
        d = DiscreteDistribution(k=2, probs=(1.0, 0.0))
        cfg = configure_buckets(8, 0.2, 16)
        stats = exact_bucket_stats(d, cfg)
        for ell, s in enumerate(stats[1:], start=2):
            assert s.h == math.log2(cfg.breakpoints[ell] / cfg.t)
