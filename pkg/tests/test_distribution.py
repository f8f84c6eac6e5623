"""Distributions: exact entropy, families, hard pairs, spec documents."""

import json
import math
from fractions import Fraction

import pytest

from entrostream.distribution import (
    DiscreteDistribution,
    DistributionError,
    entropy_gap_experiment,
    exact_entropy,
    from_spec,
    load_spec,
    make_family,
    make_hard_pair,
    parse_inline,
)


class TestExactEntropy:
    def test_uniform_k4_is_two_bits(self):
        assert exact_entropy(make_family("uniform", 4)) == pytest.approx(2.0, abs=1e-15)

    def test_point_mass_is_zero(self):
        d = DiscreteDistribution(k=3, probs=(0.0, 1.0, 0.0))
        assert exact_entropy(d) == 0.0

    def test_three_quarters_one_quarter(self):
        d = DiscreteDistribution(k=2, probs=(0.75, 0.25))
        assert exact_entropy(d) == pytest.approx(0.8112781244591329, abs=1e-14)

    def test_uniform_powers_of_two_exact(self):
        for exp in (1, 5, 11, 16):
            h = exact_entropy(make_family("uniform", 2**exp))
            assert abs(h - exp) <= 1e-12

    def test_permutation_invariance(self, gen):
        d = make_family("dirichlet-random", 40, seed=3)
        h0 = exact_entropy(d)
        perm = tuple(d.probs[j] for j in gen.permutation(40))
        assert exact_entropy(DiscreteDistribution(k=40, probs=perm)) == pytest.approx(
            h0, abs=1e-12
        )


class TestInvariants:
    def test_rejects_negative(self):
        with pytest.raises(DistributionError):
            DiscreteDistribution(k=2, probs=(1.5, -0.5))

    def test_rejects_bad_sum(self):
        with pytest.raises(DistributionError):
            DiscreteDistribution(k=2, probs=(0.6, 0.5))

    def test_rejects_length_mismatch(self):
        with pytest.raises(DistributionError):
            DiscreteDistribution(k=3, probs=(0.5, 0.5))


class TestFamilies:
    def test_uniform_k5(self):
        assert make_family("uniform", 5).probs == (0.2,) * 5

    def test_zipf_s1_k2_exact(self):
        d = make_family("zipf", 2, {"s": 1.0})
        assert d.exact_probs == (Fraction(2, 3), Fraction(1, 3))

    def test_two_point_degenerate(self):
        assert make_family("two-point", 2, {"p": 1.0}).probs == (1.0, 0.0)

    def test_geometric_normalized(self):
        d = make_family("geometric", 10, {"q": 0.3})
        assert math.fsum(d.probs) == pytest.approx(1.0, abs=1e-12)
        assert d.probs[0] > d.probs[-1]

    def test_determinism(self):
        a = make_family("dirichlet-random", 16, seed=5)
        b = make_family("dirichlet-random", 16, seed=5)
        assert a.probs == b.probs
        assert a.probs != make_family("dirichlet-random", 16, seed=6).probs

    def test_unknown_family_rejected(self):
        with pytest.raises(DistributionError):
            make_family("cauchy", 4)

    def test_bad_zipf_exponent_rejected(self):
        with pytest.raises(DistributionError):
            make_family("zipf", 4, {"s": 0.0})


class TestHardPair:
    def test_unbiased_instance_is_uniform(self):
        # find a seed whose first instance draws no bias bits at small alpha
        hi, lo = make_hard_pair(3, 1.0, seed=2)  # alpha_lo = 0 draws Y = 0 a.s.
        assert all(y == 0 for y in lo.y_bits)
        assert exact_entropy(lo.dist) == pytest.approx(math.log2(6), abs=1e-12)

    def test_single_biased_pair_entropy(self):
        for seed in range(50):
            hi, _ = make_hard_pair(1, 1.0, seed)  # alpha_hi = 1: always biased
            assert hi.y_bits == (1,)
            assert exact_entropy(hi.dist) == pytest.approx(0.954434002924965, abs=1e-12)

    def test_probability_lattice(self):
        hi, lo = make_hard_pair(20, 0.5, seed=9)
        lattice = {Fraction(3, 160), Fraction(1, 40), Fraction(5, 160)}
        assert set(hi.dist.exact_probs) <= lattice

    def test_exact_mass_and_independent_substreams(self):
        hi, lo = make_hard_pair(64, 0.2, seed=4)
        assert sum(hi.dist.exact_probs) == 1
        assert sum(lo.dist.exact_probs) == 1
        assert hi.y_bits != lo.y_bits  # disjoint sub-streams, overwhelming odds

    def test_gap_experiment_symmetric_when_eps_zero(self):
        s = entropy_gap_experiment(50, 0.0, trials=400, seed=1)
        # identical alphas: gap is pure noise, mean near zero
        assert abs(s.mean_gap) <= 4 * s.std_gap / math.sqrt(s.trials) + 1e-12

    def test_gap_experiment_separates(self):
        s = entropy_gap_experiment(1000, 0.1, trials=100, seed=7)
        assert s.mean_gap > 0
        assert s.separation_frequency > 0.5
        assert s.ci95_low > 0


class TestSpecDocuments:
    def test_explicit_fractions(self):
        d = from_spec({"explicit": ["3/4", "1/4"]})
        assert d.exact_probs == (Fraction(3, 4), Fraction(1, 4))
        assert exact_entropy(d) == pytest.approx(0.8112781244591329, abs=1e-14)

    def test_explicit_decimals(self):
        d = from_spec({"explicit": [0.5, 0.25, 0.25]})
        assert d.k == 3

    def test_family_document_roundtrip(self, tmp_path):
        doc = {"family": "zipf", "k": 8, "params": {"s": 1.0}, "seed": 0}
        path = tmp_path / "dist.json"
        path.write_text(json.dumps(doc))
        assert load_spec(str(path)).probs == make_family("zipf", 8, {"s": 1.0}).probs

    def test_inline_parsing(self):
        d = parse_inline("zipf:s=1", k=4)
        assert d.probs == make_family("zipf", 4, {"s": 1.0}).probs
        with pytest.raises(DistributionError):
            parse_inline("zipf:s=1")  # k required

    def test_missing_fields_rejected(self):
        with pytest.raises(DistributionError):
            from_spec({"family": "uniform"})
