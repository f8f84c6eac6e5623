# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stream-scanning core.

One sample = one 64-bit counter hash -> one uniform double -> one symbol
lookup.  Must stay bit-identical to entrostream.backends.stream_py; the
conversion (raw >> 11) * 2^-53 and the table arithmetic are IEEE double
operations shared with the numpy path.
"""

from libc.stdint cimport int32_t, int64_t, uint64_t

import numpy as np

from .tables import KIND_CDF

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15UL
cdef uint64_t MIX_M1 = 0xBF58476D1CE4E5B9UL
cdef uint64_t MIX_M2 = 0x94D049BB133111EBUL
cdef double INV53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z ^= z >> 30
    z *= MIX_M1
    z ^= z >> 27
    z *= MIX_M2
    z ^= z >> 31
    return z


cdef inline double _u01(uint64_t key, uint64_t n) noexcept nogil:
    return <double> (_mix64(key + (n + 1) * GOLDEN) >> 11) * INV53


cdef inline Py_ssize_t _symbol(int kind, const double* fvals,
                               const int64_t* ivals, Py_ssize_t k,
                               double u) noexcept nogil:
    cdef Py_ssize_t lo, hi, mid, j
    cdef double x, frac
    if kind == 0:  # inverse CDF: first index with cdf[idx] > u
        lo = 0
        hi = k
        while lo < hi:
            mid = (lo + hi) >> 1
            if u < fvals[mid]:
                hi = mid
            else:
                lo = mid + 1
        return lo
    x = u * k
    j = <Py_ssize_t> x
    if j >= k:
        j = k - 1
    frac = x - j
    if frac < fvals[j]:
        return j
    return <Py_ssize_t> ivals[j]


def generate(table, key, counter, n, out=None):
    """Emit n symbols into out (int32), starting at stream index counter."""
    if out is None:
        out = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] o = out
    cdef const double[::1] fv = table.fvals
    cdef const int64_t[::1] iv = table.ivals
    cdef int kind = table.kind
    cdef Py_ssize_t k = table.k
    cdef uint64_t ky = key
    cdef uint64_t ctr = counter
    cdef Py_ssize_t i, nn = n
    with nogil:
        for i in range(nn):
            o[i] = <int32_t> _symbol(kind, &fv[0], &iv[0], k, _u01(ky, ctr + i))
    return out


def scan_until_hits(table, key, counter, target, hits_needed, cap, hint=0):
    """Scan forward until `hits_needed` occurrences of `target` or `cap` draws.

    Returns (consumed, hits).  On success `consumed` is the index (1-based)
    of the final hit; otherwise consumed == cap and hits < hits_needed.
    """
    cdef const double[::1] fv = table.fvals
    cdef const int64_t[::1] iv = table.ivals
    cdef int kind = table.kind
    cdef Py_ssize_t k = table.k
    cdef uint64_t ky = key
    cdef uint64_t ctr = counter
    cdef Py_ssize_t tgt = target
    cdef int64_t need = hits_needed
    cdef int64_t lim = cap
    cdef int64_t consumed = 0
    cdef int64_t hits = 0
    with nogil:
        while consumed < lim:
            if _symbol(kind, &fv[0], &iv[0], k, _u01(ky, ctr + consumed)) == tgt:
                hits += 1
                if hits == need:
                    consumed += 1
                    break
            consumed += 1
    return int(consumed), int(hits)


def prefix_run_length(table, key, counter, target, n):
    """Draw exactly n symbols; return the length of the initial target run."""
    cdef const double[::1] fv = table.fvals
    cdef const int64_t[::1] iv = table.ivals
    cdef int kind = table.kind
    cdef Py_ssize_t k = table.k
    cdef uint64_t ky = key
    cdef uint64_t ctr = counter
    cdef Py_ssize_t tgt = target
    cdef Py_ssize_t i, nn = n
    cdef Py_ssize_t run = 0
    with nogil:
        # The stream is counter-addressed; the caller advances it by n
        # regardless, so stopping at the first miss changes nothing.
        for i in range(nn):
            if _symbol(kind, &fv[0], &iv[0], k, _u01(ky, ctr + i)) != tgt:
                break
            run += 1
    return int(run)


def count_hits(table, key, counter, target, n):
    """Draw exactly n symbols; return how many equal target."""
    cdef const double[::1] fv = table.fvals
    cdef const int64_t[::1] iv = table.ivals
    cdef int kind = table.kind
    cdef Py_ssize_t k = table.k
    cdef uint64_t ky = key
    cdef uint64_t ctr = counter
    cdef Py_ssize_t tgt = target
    cdef Py_ssize_t i, nn = n
    cdef int64_t hits = 0
    with nogil:
        for i in range(nn):
            if _symbol(kind, &fv[0], &iv[0], k, _u01(ky, ctr + i)) == tgt:
                hits += 1
    return int(hits)


def fill_histogram(table, key, counter, n, out):
    """Draw exactly n symbols; add their counts into out (int64[k])."""
    cdef int64_t[::1] o = out
    cdef const double[::1] fv = table.fvals
    cdef const int64_t[::1] iv = table.ivals
    cdef int kind = table.kind
    cdef Py_ssize_t k = table.k
    cdef uint64_t ky = key
    cdef uint64_t ctr = counter
    cdef Py_ssize_t i, nn = n
    with nogil:
        for i in range(nn):
            o[_symbol(kind, &fv[0], &iv[0], k, _u01(ky, ctr + i))] += 1
    return out


# Array-stream variants (replayed symbol buffers).


def scan_until_hits_arr(symbols, offset, target, hits_needed, cap):
    cdef const int32_t[::1] s = symbols
    cdef Py_ssize_t off = offset
    cdef Py_ssize_t avail = s.shape[0] - off
    cdef int64_t lim = cap if cap < avail else avail
    cdef int32_t tgt = <int32_t> target
    cdef int64_t need = hits_needed
    cdef int64_t consumed = 0
    cdef int64_t hits = 0
    with nogil:
        while consumed < lim:
            if s[off + consumed] == tgt:
                hits += 1
                if hits == need:
                    consumed += 1
                    break
            consumed += 1
    return int(consumed), int(hits)


def prefix_run_length_arr(symbols, offset, target, n):
    cdef const int32_t[::1] s = symbols
    cdef Py_ssize_t off = offset
    cdef int32_t tgt = <int32_t> target
    cdef Py_ssize_t i, nn = n
    cdef Py_ssize_t run = 0
    with nogil:
        for i in range(nn):
            if s[off + i] != tgt:
                break
            run += 1
    return int(run)


def count_hits_arr(symbols, offset, target, n):
    cdef const int32_t[::1] s = symbols
    cdef Py_ssize_t off = offset
    cdef int32_t tgt = <int32_t> target
    cdef Py_ssize_t i, nn = n
    cdef int64_t hits = 0
    with nogil:
        for i in range(nn):
            if s[off + i] == tgt:
                hits += 1
    return int(hits)


def fill_histogram_arr(symbols, offset, n, out):
    cdef const int32_t[::1] s = symbols
    cdef int64_t[::1] o = out
    cdef Py_ssize_t off = offset
    cdef Py_ssize_t i, nn = n
    with nogil:
        for i in range(nn):
            o[s[off + i]] += 1
    return out
