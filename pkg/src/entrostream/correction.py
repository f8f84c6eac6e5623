"""Exact construction of the estimator's bias-correction polynomial.

The corrected estimator returns log(X/t) minus a linear form g evaluated
on prefix indicators.  g is defined through the degree-r polynomial

    h_t(rho) = E[f(Z * rho / t)],   Z ~ NB(t, rho),

where f is the degree-r Taylor expansion of the natural log at 1.  Since
the j-th prefix indicator has mean rho^j, the linear form g with
g(rho, rho^2, .., rho^r) = h_t(rho) turns prefix observations into an
unbiased sample of h_t(p).

Everything here is computed in exact rational arithmetic:

* moments of the geometric law via the conditioning recurrence
  m_j = 1 + ((1-rho)/rho) * Sum_{i<j} C(j,i) m_i, carried symbolically as
  polynomials P_j with E[G^j] = P_j(rho) / rho^j;
* central moments of the scaled negative binomial by cumulant
  accumulation across the t independent geometric summands;
* h_t as the alternating 1/i combination of those central moments.

Floats appear only at evaluation time.  Entropy is reported in bits, so
evaluation scales the natural-log coefficients by 1/ln 2; the exact
coefficients themselves always stay in natural-log units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

LN2 = math.log(2.0)

# Dense polynomials in rho as tuples of Fractions, index = degree.


def poly_trim(c):
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_add(a, b):
    n = max(len(a), len(b))
    return poly_trim(
        tuple(
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
        )
    )


def poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return poly_trim(out)


def poly_scale(a, s):
    return poly_trim(tuple(ai * s for ai in a))


def poly_degree(a):
    a = poly_trim(a)
    return 0 if a == (Fraction(0),) else len(a) - 1


def poly_eval_fraction(a, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def poly_eval_float(a, x: float) -> float:
    acc = 0.0
    for c in reversed(a):
        acc = acc * x + float(c)
    return acc


_ZERO = (Fraction(0),)
_ONE = (Fraction(1),)
_RHO = (Fraction(0), Fraction(1))
_ONE_MINUS_RHO = (Fraction(1), Fraction(-1))


def geometric_moments(j_max: int):
    """Polynomials P_1..P_{j_max} with E[G^j] = P_j(rho)/rho^j, G ~ Geo(rho).

    Derived from m_j = 1 + ((1-rho)/rho) * Sum_{i<j} C(j,i) m_i by
    multiplying through by rho^j:

        P_j = rho^j + (1-rho) * Sum_{i=0}^{j-1} C(j,i) P_i rho^{j-1-i}.

    Each P_j has degree at most j; P_1 = 1, P_2 = 2 - rho.
    """
    if j_max < 1:
        raise ValueError("need at least one moment")
    p = [_ONE]  # P_0
    for j in range(1, j_max + 1):
        acc = _ZERO
        for i in range(j):
            term = poly_scale(p[i], Fraction(math.comb(j, i)))
            term = poly_mul(term, _rho_power(j - 1 - i))
            acc = poly_add(acc, term)
        pj = poly_add(_rho_power(j), poly_mul(_ONE_MINUS_RHO, acc))
        if poly_degree(pj) > j:
            raise AssertionError("geometric moment polynomial exceeded its degree bound")
        p.append(pj)
    return p[1:]


def _rho_power(n: int):
    return tuple([Fraction(0)] * n + [Fraction(1)])


def nb_central_moments(t: int, j_max: int):
    """Polynomials M_1..M_{j_max} with E[(Z rho / t - 1)^j] = M_j(rho).

    Z ~ NB(t, rho) is a sum of t independent geometrics, so cumulants of
    the centered summand V = G rho - 1 scale by t, and moments of the sum
    follow from the standard moment/cumulant recurrence (the mean is zero,
    making raw and central moments coincide).  M_1 = 0 and
    M_2 = (1 - rho)/t exactly.
    """
    if t < 1:
        raise ValueError("need a positive shape parameter")
    if j_max < 1:
        raise ValueError("need at least one moment")
    gm = [_ONE] + list(geometric_moments(j_max))  # E[G^i] * rho^i = gm[i]
    # Raw moments of V = G*rho - 1: nu_n = Sum C(n,i) (-1)^(n-i) P_i.
    nu = []
    for n in range(j_max + 1):
        acc = _ZERO
        for i in range(n + 1):
            sign = Fraction((-1) ** (n - i) * math.comb(n, i))
            acc = poly_add(acc, poly_scale(gm[i], sign))
        nu.append(acc)
    # Cumulants of V from its moments: nu_n = Sum_{m=1}^{n} C(n-1,m-1) kap_m nu_{n-m}.
    kap = [_ZERO]
    for n in range(1, j_max + 1):
        acc = nu[n]
        for m in range(1, n):
            term = poly_mul(kap[m], nu[n - m])
            acc = poly_add(acc, poly_scale(term, Fraction(-math.comb(n - 1, m - 1))))
        kap.append(acc)
    # Sum of t summands: cumulants scale by t; rebuild moments of the sum.
    kap_sum = [_ZERO] + [poly_scale(kap[n], Fraction(t)) for n in range(1, j_max + 1)]
    mu = [_ONE]
    for n in range(1, j_max + 1):
        acc = _ZERO
        for m in range(1, n + 1):
            term = poly_mul(kap_sum[m], mu[n - m])
            acc = poly_add(acc, poly_scale(term, Fraction(math.comb(n - 1, m - 1))))
        mu.append(acc)
    out = []
    for j in range(1, j_max + 1):
        mj = poly_scale(mu[j], Fraction(1, t**j))
        if poly_degree(mj) > j:
            raise AssertionError("scaled central moment exceeded its degree bound")
        out.append(mj)
    return out


class ConfigurationError(ValueError):
    """Correction parameters outside the regime the construction needs."""


@dataclass(frozen=True)
class CorrectionPolynomial:
    """Coefficients c_0..c_r of h_t in the monomial basis (natural-log units).

    ``log_base_scale`` is applied at evaluation: 1/ln 2 when outputs are in
    bits, 1.0 for natural log.  The linear form g on indicator vectors is
    evaluated through prefix sums: an indicator pattern reachable from a
    prefix of length c contributes c_0 + c_1 + .. + c_c.
    """

    t: int
    r: int
    coeffs: tuple  # Fractions, length r + 1
    log_base_scale: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def prefix_table(self):
        """Float values of g for each prefix length 0..r, exact-sum first."""
        tab = self._cache.get("prefix")
        if tab is None:
            acc = Fraction(0)
            vals = []
            for c in self.coeffs:
                acc += c
                vals.append(float(acc) * self.log_base_scale)
            tab = tuple(vals)
            self._cache["prefix"] = tab
        return tab

    def h_at(self, rho: float) -> float:
        """h_t(rho) in output units (float evaluation of the exact poly)."""
        return poly_eval_float(self.coeffs, rho) * self.log_base_scale

    def h_at_exact(self, rho: Fraction) -> Fraction:
        """h_t(rho) exactly, in natural-log units."""
        return poly_eval_fraction(self.coeffs, rho)

    def sum_abs_tail(self) -> Fraction:
        """Sum of |c_j| over j >= 1 (natural-log units)."""
        return sum((abs(c) for c in self.coeffs[1:]), Fraction(0))

    def g_extreme(self) -> float:
        """max over reachable indicator patterns of |g| in output units.

        Reachable patterns are exactly the prefix patterns, so the extreme
        is the largest |prefix sum|.
        """
        return max(abs(v) for v in self.prefix_table)


def build_correction(t: int, r: int, base: str = "bits") -> CorrectionPolynomial:
    """Construct h_t for the degree-r log Taylor correction.

    h_t(rho) = Sum_{i=1}^{r} ((-1)^(i+1) / i) * M_i(rho) with the M_i the
    exact scaled central moments.  Requires t >= 4 r^2: the boundedness of
    g rests on r being well below sqrt(t), and this is the checkable form
    of that margin.  r = 1 yields the zero polynomial (M_1 = 0); r = 2
    yields c_0 = -1/(2t), c_1 = 1/(2t).
    """
    if r < 1:
        raise ConfigurationError("correction degree must be >= 1")
    if t < 4 * r * r:
        raise ConfigurationError(
            f"t = {t} is below 4*r^2 = {4 * r * r}; the correction's "
            "boundedness guarantee needs t >= 4r^2"
        )
    if base == "bits":
        scale = 1.0 / LN2
    elif base in ("nats", "natural"):
        scale = 1.0
    else:
        raise ConfigurationError(f"unknown log base {base!r} (use 'bits' or 'nats')")
    h = _ZERO
    if r >= 2:
        moments = nb_central_moments(t, r)
        for i in range(2, r + 1):  # M_1 = 0 contributes nothing
            h = poly_add(h, poly_scale(moments[i - 1], Fraction((-1) ** (i + 1), i)))
    coeffs = list(poly_trim(h))
    coeffs += [Fraction(0)] * (r + 1 - len(coeffs))
    if len(coeffs) > r + 1:
        raise AssertionError("bias polynomial exceeded degree r")
    return CorrectionPolynomial(t=t, r=r, coeffs=tuple(coeffs), log_base_scale=scale)


def eval_g(corr: CorrectionPolynomial, prefix_len: int) -> float:
    """g on the indicator pattern of a length-``prefix_len`` matching prefix."""
    if not 0 <= prefix_len <= corr.r:
        raise ValueError(f"prefix length {prefix_len} outside 0..{corr.r}")
    return corr.prefix_table[prefix_len]


class BitBoundReport(NamedTuple):
    max_numerator_bits: int
    max_denominator_bits: int
    limit_bits: float
    passed: bool


def coefficient_bit_bound(corr: CorrectionPolynomial, c_bits: float = 8.0) -> BitBoundReport:
    """Measure exact coefficient sizes against the c_bits * r * log2(r+1) budget.

    The budget constant is an artifact calibration (frozen default 8);
    what matters is the shape: coefficient storage grows like r log r
    bits, so the correction stays a program constant, not working state.
    """
    num_bits = 0
    den_bits = 0
    for c in corr.coeffs:
        num_bits = max(num_bits, abs(c.numerator).bit_length())
        den_bits = max(den_bits, c.denominator.bit_length() if c != 0 else 0)
    limit = c_bits * corr.r * math.log2(corr.r + 1)
    return BitBoundReport(
        max_numerator_bits=num_bits,
        max_denominator_bits=den_bits,
        limit_bits=limit,
        passed=max(num_bits, den_bits) <= limit,
    )


def dump_coefficients(corr: CorrectionPolynomial) -> str:
    """Exact fractions, one coefficient per line, with a (t, r, base) header."""
    base = "bits" if corr.log_base_scale != 1.0 else "nats"
    lines = [f"t={corr.t} r={corr.r} base={base}"]
    for j, c in enumerate(corr.coeffs):
        lines.append(f"c{j} {c.numerator}/{c.denominator}")
    return "\n".join(lines) + "\n"
