"""Deterministic ground truth for every expectation the estimators target.

All oracles reduce to truncated sums over the negative binomial pmf,
evaluated in log space via log-gamma.  Truncation is certified: the pmf
ratio between consecutive support points, (1-p) x / (x - t + 1), decreases
in x, so once it drops below one the tail is dominated by a geometric
series and the neglected log-weighted contribution has a closed-form
bound.  That bound is returned as an enclosure half-width alongside each
value, making every oracle "exact within the stated enclosure" - orders
of magnitude tighter than any tolerance used by the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .distribution import DiscreteDistribution

LN2 = math.log(2.0)


@dataclass(frozen=True)
class TruncationPolicy:
    tol: float = 1e-10
    hard_cap: int | None = None

    def __post_init__(self):
        if self.tol <= 0.0:
            raise ValueError("truncation tolerance must be positive")


DEFAULT_POLICY = TruncationPolicy()


class OracleValue(NamedTuple):
    value: float
    enclosure: float  # half-width of the certified interval


def nb_log_pmf(t: int, p: float, x: int) -> float:
    """log pmf of NB(t, p) at x: C(x-1, t-1) p^t (1-p)^(x-t)."""
    if x < t:
        return -math.inf
    if p >= 1.0:
        return 0.0 if x == t else -math.inf
    return (
        math.lgamma(x)
        - math.lgamma(t)
        - math.lgamma(x - t + 1)
        + t * math.log(p)
        + (x - t) * math.log1p(-p)
    )


def nb_pmf(t: int, p: float, x: int) -> float:
    """pmf of the draws-until-t-th-hit law; 0 below the support start."""
    if t < 1:
        raise ValueError("need a positive shape parameter")
    if not 0.0 < p <= 1.0:
        raise ValueError("hit probability must lie in (0, 1]")
    lp = nb_log_pmf(t, p, x)
    return math.exp(lp) if lp > -math.inf else 0.0


def _log_tail_bound(t: int, p: float, x: int, pmf_x: float) -> float:
    """Certified bound on Sum_{y >= x} pmf(y) * log2(y/t).

    With rho the pmf ratio at x (a decreasing function of y), pmf(y) <=
    pmf(x) rho^(y-x), and log2(y/t) <= log2(x/t) + (y-x)/(x ln 2); summing
    the geometric series gives the bound.  Infinite while rho >= 1.
    """
    if pmf_x == 0.0:
        return 0.0
    rho = (1.0 - p) * x / (x - t + 1)
    if rho >= 1.0:
        return math.inf
    w = math.log2(x / t)
    return pmf_x * (w / (1.0 - rho) + rho / (x * LN2 * (1.0 - rho) ** 2))


def expected_log_X_over_t(
    t: int, p: float, policy: TruncationPolicy = DEFAULT_POLICY
) -> OracleValue:
    """E[log2(X/t)] for X ~ NB(t, p), as a certified enclosure.

    Summation runs upward from t with compensated accumulation and stops
    once the certified tail bound falls below the policy tolerance (or at
    the policy's hard cap, in which case the possibly-larger bound is
    reported as the enclosure).
    """
    if t < 1:
        raise ValueError("need a positive shape parameter")
    if not 0.0 < p <= 1.0:
        raise ValueError("hit probability must lie in (0, 1]")
    if p >= 1.0:
        return OracleValue(0.0, 0.0)
    acc = 0.0
    comp = 0.0
    x = t
    while True:
        fx = nb_pmf(t, p, x)
        if x > t:
            bound = _log_tail_bound(t, p, x, fx)
            capped = policy.hard_cap is not None and x >= policy.hard_cap
            if bound <= policy.tol or capped:
                return OracleValue(acc + comp, bound)
        term = fx * math.log2(x / t)
        s = acc + term
        if abs(acc) >= abs(term):
            comp += (acc - s) + term
        else:
            comp += (term - s) + acc
        acc = s
        x += 1


def expected_eta(
    t: int,
    r: int,
    p: float,
    corr,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> OracleValue:
    """Mean output of the corrected log estimator at true probability p.

    E[eta] = E[log2(X/t)] - scale * h_t(p): the prefix-indicator part of
    the estimator is unbiased for h_t(p) by construction, so no sampling
    enters here.
    """
    if corr.t != t or corr.r != r:
        raise ValueError("correction polynomial was built for different (t, r)")
    base = expected_log_X_over_t(t, p, policy)
    return OracleValue(base.value - corr.h_at(p), base.enclosure)


def exact_H_tilde(
    d: DiscreteDistribution,
    t: int,
    x_max: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> OracleValue:
    """E[log2(X'/t)] with X' = min(X, x_max), mixed over i ~ d.

    Finite by construction: the survival mass at x_max contributes the
    capped value log2(x_max/t) exactly, so the only inexactness is float
    roundoff (reported as a token enclosure).
    """
    if x_max < t:
        raise ValueError("the cap must be at least the support start t")
    total = 0.0
    for p_i in d.probs:
        if p_i <= 0.0:
            continue
        total += p_i * _truncated_log_mean(t, p_i, x_max)
    return OracleValue(total, 1e-12 * (1.0 + abs(total)))


def _truncated_log_mean(t: int, p: float, x_max: int) -> float:
    if p >= 1.0:
        return 0.0  # X = t always; log2(t/t) = 0 regardless of the cap
    acc = 0.0
    mass = 0.0
    for x in range(t, x_max):
        fx = nb_pmf(t, p, x)
        mass += fx
        acc += fx * math.log2(x / t)
    survival = max(0.0, 1.0 - mass)
    return acc + survival * math.log2(x_max / t)


class BucketOracle(NamedTuple):
    q: float  # probability that X' lands in the interval
    h: float  # conditional mean of log2(X'/t) there (fallback when empty)
    zero_mass: bool


def exact_bucket_stats(d: DiscreteDistribution, cfg) -> list:
    """Per-interval (q, H) decomposition of exact_H_tilde for a BucketConfig.

    Intervals are [b_(l-1), b_l), the last closed at x_max.  The law of
    total expectation ties the rows back together: Sum q_l H_l equals
    exact_H_tilde up to float roundoff.  Zero-mass intervals report the
    boundary fallback value log2(b_l / t) and a flag.
    """
    bps = list(cfg.breakpoints)
    t = cfg.t
    x_max = cfg.x_max
    nb = len(bps) - 1
    q = [0.0] * nb
    acc = [0.0] * nb
    for p_i in d.probs:
        if p_i <= 0.0:
            continue
        if p_i >= 1.0:
            q[0] += p_i  # X = t sits at the left edge of the first interval
            continue
        mass = 0.0
        for ell in range(nb):
            for x in range(bps[ell], bps[ell + 1]):
                fx = nb_pmf(t, p_i, x)
                mass += fx
                q[ell] += p_i * fx
                acc[ell] += p_i * fx * math.log2(x / t)
        survival = max(0.0, 1.0 - mass)
        q[nb - 1] += p_i * survival
        acc[nb - 1] += p_i * survival * math.log2(x_max / t)
    out = []
    for ell in range(nb):
        if q[ell] > 0.0:
            out.append(BucketOracle(q=q[ell], h=acc[ell] / q[ell], zero_mass=False))
        else:
            out.append(
                BucketOracle(q=0.0, h=math.log2(bps[ell + 1] / t), zero_mass=True)
            )
    return out
