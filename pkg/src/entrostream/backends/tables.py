"""Sampling tables shared by every backend.

A SymbolTable turns one uniform double into one symbol.  Small alphabets
use an inverse-CDF search; larger ones use a Walker/Vose alias table so a
draw costs O(1) regardless of k.  Construction is deterministic, and both
backends consume the same arrays with the same arithmetic, so a given
(table, key, counter) triple yields the same symbol everywhere.
"""

from __future__ import annotations

import numpy as np

KIND_CDF = 0
KIND_ALIAS = 1

# Inverse-CDF search wins below this alphabet size; alias above.
CDF_MAX_K = 64

_EMPTY_I64 = np.zeros(1, dtype=np.int64)


class SymbolTable:
    __slots__ = ("kind", "k", "fvals", "ivals")

    def __init__(self, kind, k, fvals, ivals):
        self.kind = kind
        self.k = k
        self.fvals = fvals  # cdf (KIND_CDF) or alias acceptance thresholds
        self.ivals = ivals  # alias redirect targets (unused for KIND_CDF)


def build_table(probs) -> SymbolTable:
    p = np.ascontiguousarray(probs, dtype=np.float64)
    k = p.shape[0]
    if k <= CDF_MAX_K:
        cdf = np.cumsum(p)
        cdf[-1] = 1.0  # absorb cumulative rounding; u < 1 always lands
        return SymbolTable(KIND_CDF, k, cdf, _EMPTY_I64)
    return _build_alias(p, k)


def _build_alias(p, k):
    scaled = p * k
    alias = np.arange(k, dtype=np.int64)
    accept = np.ones(k, dtype=np.float64)
    small = [i for i in range(k) if scaled[i] < 1.0]
    large = [i for i in range(k) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        g = large.pop()
        accept[s] = scaled[s]
        alias[s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        if scaled[g] < 1.0:
            small.append(g)
        else:
            large.append(g)
    # Leftovers are within rounding of 1; they keep accept = 1, alias = self.
    return SymbolTable(KIND_ALIAS, k, accept, alias)
