"""Counter-based 64-bit pseudorandom generator with named sub-streams.

Sample ``n`` of the stream keyed by ``key`` is::

    raw64(key, n) = mix64((key + (n + 1) * GOLDEN) mod 2**64)

where ``mix64`` is the SplitMix64 finalizer.  Every output is a pure
function of ``(key, n)``, so any range of the stream can be generated
independently, out of order, in batches, and on any backend (scalar
Python, numpy, or the compiled core) with identical bits.  The sample
counter of a stream therefore doubles as its generator state.

Sub-streams are derived by folding integer tags into the key with
``derive_key``; the scheme is part of the reproducibility contract and
must not change between releases.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX_M1 = 0xBF58476D1CE4E5B9
_MIX_M2 = 0x94D049BB133111EB

# Sub-stream phase tags.  New phases append; existing values are frozen.
PHASE_STREAM = 1  # symbol draws of a SampleSource
PHASE_FAMILY = 2  # randomized distribution families (dirichlet-random)
PHASE_HARDPAIR_Y = 3  # Bernoulli bias indicators of a hard-pair instance
PHASE_HARDPAIR_Z = 4  # Rademacher bias directions of a hard-pair instance
PHASE_TRIAL = 5  # per-trial seeds in the experiment harness
PHASE_AMPLIFY = 6  # per-copy seeds of the success-amplification wrapper
PHASE_HARDPAIR_EST = 7  # estimator streams attached to hard-pair instances


def mix64(z: int) -> int:
    """SplitMix64 finalizer (invertible 64-bit mix)."""
    z &= MASK64
    z ^= z >> 30
    z = (z * _MIX_M1) & MASK64
    z ^= z >> 27
    z = (z * _MIX_M2) & MASK64
    z ^= z >> 31
    return z


def raw64(key: int, n: int) -> int:
    """The n-th (0-based) raw 64-bit output of stream ``key``."""
    return mix64((key + (n + 1) * GOLDEN) & MASK64)


def u01(key: int, n: int) -> float:
    """The n-th uniform double in [0, 1), using the top 53 bits of raw64."""
    return (raw64(key, n) >> 11) * 2.0**-53


def derive_key(key: int, *tags: int) -> int:
    """Fold non-negative integer tags into ``key`` to name a sub-stream.

    derive_key(k, a, b) != derive_key(k, b, a) in general; tag order is
    significant.  Folding is ``h -> mix64(h ^ mix64(tag + GOLDEN))``
    starting from ``mix64(key)``.
    """
    h = mix64(key & MASK64)
    for tag in tags:
        if tag < 0:
            raise ValueError("sub-stream tags must be non-negative")
        h = mix64(h ^ mix64((tag + GOLDEN) & MASK64))
    return h


def trial_seed(seed: int, trial_index: int, phase: int = PHASE_TRIAL) -> int:
    """Per-trial seed derivation used by the harness (documented scheme)."""
    return derive_key(seed, phase, trial_index)
