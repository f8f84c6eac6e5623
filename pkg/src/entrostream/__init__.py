"""Constant-memory streaming estimation of Shannon entropy.

Estimate the entropy of an unknown distribution over {1..k} to within an
additive eps from i.i.d. samples, holding only a constant number of scalar
registers while the stream is processed.  The sample cost is
k * polylog(1/eps) / eps^2: the estimator tracks how long the stream takes
to repeat a freshly drawn symbol t times, and removes the resulting
logarithmic bias with an exact low-degree polynomial correction evaluated
on prefix-match indicators.

Modules: distribution (alphabets, families, exact entropy), sampling
(seeded streams, draw accounting, budget guard), correction
(exact-rational bias polynomial), estimators (pipelines and baselines),
oracle (deterministic expectations with certified enclosures), harness
(experiments, CSV/JSON), validation (named checks incl. the acceptance
gate), backends (compiled core / numpy fallback).
"""

__version__ = "0.1.0"

from .backends import ACTIVE_BACKEND
from .distribution import DiscreteDistribution, exact_entropy, make_family, make_hard_pair
from .estimators import (
    BucketConfig,
    EstimateReport,
    SimpleConfig,
    bucketed_entropy_estimate,
    configure_buckets,
    simple_entropy_estimate,
)
from .sampling import BudgetGuard, ReplaySource, SampleSource
from .correction import CorrectionPolynomial, build_correction

__all__ = [
    "ACTIVE_BACKEND",
    "BucketConfig",
    "BudgetGuard",
    "CorrectionPolynomial",
    "DiscreteDistribution",
    "EstimateReport",
    "ReplaySource",
    "SampleSource",
    "SimpleConfig",
    "__version__",
    "bucketed_entropy_estimate",
    "build_correction",
    "configure_buckets",
    "exact_entropy",
    "make_family",
    "make_hard_pair",
    "simple_entropy_estimate",
]
