"""Counter-based uniform random numbers.

Every draw is a pure hash of (seed, trial, draw index) built from the
splitmix64 finalizer, so a sample depends only on its coordinates: trials can
be generated in any order, on any number of workers, and on any platform with
identical results.  Statistical quality is validated downstream against exact
combinatorial oracles.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLD_INT = 0x9E3779B97F4A7C15
_M1_INT = 0xBF58476D1CE4E5B9
_M2_INT = 0x94D049BB133111EB

_GOLD = np.uint64(_GOLD_INT)
_M1 = np.uint64(_M1_INT)
_M2 = np.uint64(_M2_INT)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / float(1 << 53)


def _mix_int(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * _M1_INT) & _MASK
    z = ((z ^ (z >> 27)) * _M2_INT) & _MASK
    return z ^ (z >> 31)


def fold(*words: int) -> int:
    """Collapse integer words into one 64-bit key (for deriving child seeds)."""
    h = _mix_int(0x5851F42D4C957F2D)
    for w in words:
        h = _mix_int(h ^ ((int(w) * _GOLD_INT + _GOLD_INT) & _MASK))
    return h


def _mix_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def uniform_matrix(seed: int, trials: np.ndarray, count: int) -> np.ndarray:
    """Uniforms in [0, 1) for a block of trials; shape (len(trials), count)."""
    base = _mix_int((int(seed) + _GOLD_INT) & _MASK)
    t = np.asarray(trials, dtype=np.uint64).reshape(-1, 1)
    kt = _mix_np(np.uint64(base) ^ (t * _GOLD + _GOLD))
    if count == 0:
        return np.empty((t.shape[0], 0), dtype=float)
    i = np.arange(count, dtype=np.uint64).reshape(1, -1)
    h = _mix_np(kt ^ (i * _GOLD + _GOLD))
    return (h >> _S11).astype(np.float64) * _INV53


def uniforms(seed: int, trial: int, count: int) -> np.ndarray:
    """Uniforms in [0, 1) for one trial; identical to the matching matrix row."""
    return uniform_matrix(seed, np.array([trial], dtype=np.uint64), count)[0]
