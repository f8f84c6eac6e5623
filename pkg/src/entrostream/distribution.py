"""Discrete distributions over [k]: exact entropy, named families, hard pairs.

Probabilities are built in exact rational arithmetic wherever the family
permits (uniform, integer-exponent zipf, two-point, hard pairs) and
converted to floats once, so downstream oracles can rely on the exact
values.  Distributions are immutable after construction and safe to share
across threads.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from . import rng
from .backends import build_table

PROB_SUM_TOL = 1e-12

FAMILIES = ("uniform", "zipf", "geometric", "two-point", "dirichlet-random")


class DistributionError(ValueError):
    """Malformed distribution or family parameters."""


@dataclass(frozen=True)
class DiscreteDistribution:
    """A probability vector over the alphabet {0, .., k-1}.

    Symbols are 0-based internally; the one-based convention of stream
    replay files is translated at the file boundary.
    """

    k: int
    probs: tuple
    exact_probs: Optional[tuple] = None  # Fractions, when the family permits
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.k < 1:
            raise DistributionError("alphabet size must be >= 1")
        if len(self.probs) != self.k:
            raise DistributionError(
                f"got {len(self.probs)} probabilities for alphabet size {self.k}"
            )
        if any(p < 0.0 for p in self.probs):
            raise DistributionError("probabilities must be non-negative")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise DistributionError(f"probabilities sum to {total!r}, not 1")
        if self.exact_probs is not None and sum(self.exact_probs) != 1:
            raise DistributionError("exact probabilities must sum to exactly 1")

    @property
    def table(self):
        """Sampling table, built once on first use."""
        tab = self._cache.get("table")
        if tab is None:
            tab = build_table(np.asarray(self.probs, dtype=np.float64))
            self._cache["table"] = tab
        return tab

    def entropy_bits(self) -> float:
        return exact_entropy(self)


def _from_probs(probs_float, exact=None) -> DiscreteDistribution:
    return DiscreteDistribution(
        k=len(probs_float),
        probs=tuple(float(p) for p in probs_float),
        exact_probs=tuple(exact) if exact is not None else None,
    )


def exact_entropy(d: DiscreteDistribution) -> float:
    """Shannon entropy in bits, Sum p_i * log2(1/p_i), with 0 log(1/0) := 0.

    Uses Neumaier compensated summation so that e.g. the uniform
    distribution on a power-of-two alphabet comes out exact to 1e-12.
    """
    total = 0.0
    comp = 0.0
    for p in d.probs:
        if p <= 0.0:
            continue
        term = -p * math.log2(p)
        s = total + term
        if abs(total) >= abs(term):
            comp += (total - s) + term
        else:
            comp += (term - s) + total
        total = s
    return total + comp


def make_family(name: str, k: int, params: dict | None = None, seed: int = 0):
    """Build a named distribution family, bit-reproducibly.

    Families: uniform | zipf(s) | geometric(q) | two-point(p) |
    dirichlet-random.  Identical (name, k, params, seed) always produce
    identical probability vectors.
    """
    params = dict(params or {})
    if k < 1:
        raise DistributionError("alphabet size must be >= 1")
    if name == "uniform":
        exact = [Fraction(1, k)] * k
        return _from_probs([float(q) for q in exact], exact)
    if name == "zipf":
        s = float(params.pop("s", 1.0))
        _reject_extras("zipf", params)
        if s <= 0:
            raise DistributionError("zipf exponent must be positive")
        if s == int(s):
            w = [Fraction(1, i ** int(s)) for i in range(1, k + 1)]
            z = sum(w)
            exact = [wi / z for wi in w]
            return _from_probs([float(q) for q in exact], exact)
        w = np.arange(1, k + 1, dtype=np.float64) ** (-s)
        return _from_probs(w / w.sum())
    if name == "geometric":
        q = float(params.pop("q", 0.5))
        _reject_extras("geometric", params)
        if not 0.0 < q < 1.0:
            raise DistributionError("geometric ratio must lie in (0, 1)")
        w = (1.0 - q) ** np.arange(k, dtype=np.float64)
        return _from_probs(w / w.sum())
    if name == "two-point":
        p = params.pop("p", 0.5)
        _reject_extras("two-point", params)
        if k < 2:
            raise DistributionError("two-point needs an alphabet of size >= 2")
        pf = Fraction(p)  # float -> Fraction is exact
        if not 0 <= pf <= 1:
            raise DistributionError("two-point mass must lie in [0, 1]")
        exact = [pf, 1 - pf] + [Fraction(0)] * (k - 2)
        return _from_probs([float(q) for q in exact], exact)
    if name == "dirichlet-random":
        _reject_extras("dirichlet-random", params)
        key = rng.derive_key(seed, rng.PHASE_FAMILY)
        # Dirichlet(1,..,1) via normalized exponentials of the sub-stream.
        e = [-math.log(1.0 - rng.u01(key, i)) for i in range(k)]
        z = math.fsum(e)
        return _from_probs([x / z for x in e])
    raise DistributionError(f"unknown family {name!r}; expected one of {FAMILIES}")


def _reject_extras(name, params):
    if params:
        raise DistributionError(f"unknown {name} parameters: {sorted(params)}")


# Hard instance pairs: two near-uniform ensembles over [2k] whose
# entropies differ by Theta(eps) depending on a Bernoulli bias rate.


@dataclass(frozen=True)
class HardPairInstance:
    k: int  # number of symbol pairs; the alphabet has 2k symbols
    alpha: float  # Bernoulli rate of the bias indicators
    y_bits: tuple
    z_signs: tuple
    dist: DiscreteDistribution

    def __post_init__(self):
        allowed = {
            Fraction(3, 4) / (2 * self.k),
            Fraction(1, 1) / (2 * self.k),
            Fraction(5, 4) / (2 * self.k),
        }
        for q in self.dist.exact_probs:
            if q not in allowed:
                raise DistributionError("hard-pair probability off-lattice")


def _hard_instance(k: int, alpha: float, seed: int, which: int) -> HardPairInstance:
    key_y = rng.derive_key(seed, rng.PHASE_HARDPAIR_Y, which)
    key_z = rng.derive_key(seed, rng.PHASE_HARDPAIR_Z, which)
    y = tuple(1 if rng.u01(key_y, i) < alpha else 0 for i in range(k))
    z = tuple(1 if rng.u01(key_z, i) < 0.5 else -1 for i in range(k))
    half = Fraction(1, 2 * k)
    quarter = Fraction(1, 4)
    exact = []
    for yi, zi in zip(y, z):
        bias = quarter * (yi * zi)
        exact.append(half * (1 + bias))
        exact.append(half * (1 - bias))
    dist = _from_probs([float(q) for q in exact], exact)
    return HardPairInstance(k=k, alpha=alpha, y_bits=y, z_signs=z, dist=dist)


def make_hard_pair(k: int, eps: float, seed: int):
    """Draw one (high-bias, low-bias) instance pair.

    The first instance biases each symbol pair with rate (1+eps)/2, the
    second with rate (1-eps)/2; more biased pairs mean lower entropy.  The
    Y and Z draws of the two instances come from disjoint sub-streams of
    ``seed`` so the comparison is a clean A/B.
    """
    if k < 1:
        raise DistributionError("need at least one symbol pair")
    if not 0.0 <= eps <= 1.0:
        raise DistributionError("bias separation eps must lie in [0, 1]")
    hi = _hard_instance(k, (1.0 + eps) / 2.0, seed, 0)
    lo = _hard_instance(k, (1.0 - eps) / 2.0, seed, 1)
    return hi, lo


class GapSummary(NamedTuple):
    trials: int
    mean_gap: float
    std_gap: float
    separation_frequency: float
    ci95_low: float
    ci95_high: float


def entropy_gap_experiment(k: int, eps: float, trials: int, seed: int) -> GapSummary:
    """Exact-entropy gap between the two hard-pair ensembles over many seeds.

    gap := H(low-bias instance) - H(high-bias instance); positive gaps mean
    the ensembles are ordered the way the construction intends.
    """
    if trials < 1:
        raise DistributionError("need at least one trial")
    gaps = np.empty(trials, dtype=np.float64)
    for tr in range(trials):
        hi, lo = make_hard_pair(k, eps, rng.trial_seed(seed, tr))
        gaps[tr] = exact_entropy(lo.dist) - exact_entropy(hi.dist)
    mean = float(gaps.mean())
    std = float(gaps.std(ddof=1)) if trials > 1 else 0.0
    half = 1.959963984540054 * std / math.sqrt(trials) if trials > 1 else 0.0
    return GapSummary(
        trials=trials,
        mean_gap=mean,
        std_gap=std,
        separation_frequency=float(np.mean(gaps > 0.0)),
        ci95_low=mean - half,
        ci95_high=mean + half,
    )


# Distribution spec documents: {"family": .., "k": .., "params": {..},
# "seed": ..} or {"explicit": [p_1, .., p_k]} with probabilities given as
# decimals or exact fractions "a/b".


def _parse_prob(v):
    if isinstance(v, str):
        return Fraction(v)
    return v


def from_spec(doc: dict) -> DiscreteDistribution:
    if "explicit" in doc:
        vals = [_parse_prob(v) for v in doc["explicit"]]
        exact = None
        if all(isinstance(v, (Fraction, int)) for v in vals):
            exact = [Fraction(v) for v in vals]
        return _from_probs([float(v) for v in vals], exact)
    try:
        family = doc["family"]
        k = int(doc["k"])
    except KeyError as exc:
        raise DistributionError(f"distribution spec is missing {exc}") from None
    return make_family(family, k, doc.get("params"), int(doc.get("seed", 0)))


def load_spec(path: str) -> DiscreteDistribution:
    with open(path, "r", encoding="utf-8") as fh:
        return from_spec(json.load(fh))


def parse_inline(text: str, k: int | None = None, seed: int = 0):
    """Parse a CLI-style family spec: 'zipf:s=1', 'uniform', 'two-point:p=0.9'.

    A string naming an existing file (or prefixed with '@') is loaded as a
    spec document instead.
    """
    if text.startswith("@"):
        return load_spec(text[1:])
    if os.path.isfile(text):
        return load_spec(text)
    name, _, paramtext = text.partition(":")
    params = {}
    if paramtext:
        for item in paramtext.split(","):
            key, _, val = item.partition("=")
            if not _:
                raise DistributionError(f"bad family parameter {item!r}")
            params[key.strip()] = float(val)
    if k is None:
        raise DistributionError("inline family specs need --k")
    return make_family(name.strip(), k, params, seed)
