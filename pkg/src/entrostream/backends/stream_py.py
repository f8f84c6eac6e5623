"""Numpy fallback for the stream-scanning kernels.

Mirrors entrostream.backends._stream_c operation for operation.  Symbols
are produced in batches, but a kernel only advances the stream by the
samples it actually reports as consumed, so results are bit-identical to
the one-at-a-time compiled scan.
"""

from __future__ import annotations

import numpy as np

from .tables import KIND_CDF

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 2.0**-53

_CHUNK_MIN = 128
_CHUNK_MAX = 1 << 20


def _uniforms(key, start, n):
    """Uniform doubles for sample indices start .. start+n-1."""
    idx = np.arange(start + 1, start + 1 + n, dtype=np.uint64)
    z = np.uint64(key) + idx * _GOLDEN
    z ^= z >> _S30
    z *= _M1
    z ^= z >> _S27
    z *= _M2
    z ^= z >> _S31
    return (z >> _S11).astype(np.float64) * _INV53


def _symbols_from_u(table, u):
    if table.kind == KIND_CDF:
        return np.searchsorted(table.fvals, u, side="right").astype(np.int64)
    x = u * table.k
    j = x.astype(np.int64)
    np.minimum(j, table.k - 1, out=j)
    frac = x - j
    return np.where(frac < table.fvals[j], j, table.ivals[j])


def generate(table, key, counter, n, out=None):
    """Emit n symbols into out (int32), starting at stream index counter."""
    if out is None:
        out = np.empty(n, dtype=np.int32)
    pos = 0
    while pos < n:
        m = min(n - pos, _CHUNK_MAX)
        u = _uniforms(key, counter + pos, m)
        out[pos : pos + m] = _symbols_from_u(table, u)
        pos += m
    return out


def scan_until_hits(table, key, counter, target, hits_needed, cap, hint=0):
    """Scan forward until `hits_needed` occurrences of `target` or `cap` draws.

    Returns (consumed, hits).  On success `consumed` is the index (1-based)
    of the final hit; otherwise consumed == cap and hits < hits_needed.
    """
    chunk = min(max(int(hint) + 64, _CHUNK_MIN), _CHUNK_MAX)
    consumed = 0
    hits = 0
    while consumed < cap and hits < hits_needed:
        m = min(chunk, cap - consumed)
        u = _uniforms(key, counter + consumed, m)
        sym = _symbols_from_u(table, u)
        hit_pos = np.flatnonzero(sym == target)
        need = hits_needed - hits
        if hit_pos.size >= need:
            consumed += int(hit_pos[need - 1]) + 1
            hits = hits_needed
        else:
            hits += int(hit_pos.size)
            consumed += m
            chunk = min(chunk * 2, _CHUNK_MAX)
    return consumed, hits


def prefix_run_length(table, key, counter, target, n):
    """Draw exactly n symbols; return the length of the initial target run."""
    run = 0
    pos = 0
    broken = False
    while pos < n:
        m = min(n - pos, _CHUNK_MAX)
        u = _uniforms(key, counter + pos, m)
        sym = _symbols_from_u(table, u)
        if not broken:
            miss = np.flatnonzero(sym != target)
            if miss.size:
                run += int(miss[0])
                broken = True
            else:
                run += m
        pos += m
    return run


def count_hits(table, key, counter, target, n):
    """Draw exactly n symbols; return how many equal target."""
    hits = 0
    pos = 0
    while pos < n:
        m = min(n - pos, _CHUNK_MAX)
        u = _uniforms(key, counter + pos, m)
        sym = _symbols_from_u(table, u)
        hits += int(np.count_nonzero(sym == target))
        pos += m
    return hits


def fill_histogram(table, key, counter, n, out):
    """Draw exactly n symbols; add their counts into out (int64[k])."""
    k = out.shape[0]
    pos = 0
    while pos < n:
        m = min(n - pos, _CHUNK_MAX)
        u = _uniforms(key, counter + pos, m)
        sym = _symbols_from_u(table, u)
        out += np.bincount(sym, minlength=k).astype(np.int64)
        pos += m
    return out


# Array-stream variants (replayed symbol buffers).


def scan_until_hits_arr(symbols, offset, target, hits_needed, cap):
    window = symbols[offset : offset + cap]
    hit_pos = np.flatnonzero(window == target)
    if hit_pos.size >= hits_needed:
        return int(hit_pos[hits_needed - 1]) + 1, hits_needed
    return window.shape[0], int(hit_pos.size)


def prefix_run_length_arr(symbols, offset, target, n):
    window = symbols[offset : offset + n]
    miss = np.flatnonzero(window != target)
    return int(miss[0]) if miss.size else int(window.shape[0])


def count_hits_arr(symbols, offset, target, n):
    return int(np.count_nonzero(symbols[offset : offset + n] == target))


def fill_histogram_arr(symbols, offset, n, out):
    k = out.shape[0]
    out += np.bincount(symbols[offset : offset + n], minlength=k).astype(np.int64)
    return out
