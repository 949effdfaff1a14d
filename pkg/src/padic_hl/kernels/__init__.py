"""Batch kernels for matrix sampling and singular-number extraction.

Two interchangeable backends implement the same functions:

* ``numba``: per-sample loops compiled with ``@njit`` (default when numba imports)
* ``numpy``: the same algorithms vectorized over the batch axis

``PADIC_HL_BACKEND=numba|numpy`` selects the backend at import time;
:func:`get_backend` returns either one explicitly.  Both backends consume the
random streams identically, so a run is reproducible across backends.

Kernel API (all arrays are int64 residues in [0, M) unless noted):

``draw(states, m, limit, count)``
    ``count`` uniform values in [0, m) per sample; advances ``states`` (uint64) in place.
``unit_det_mask(re, im, d, p, ext)``
    bool per sample: is the determinant a unit mod p.
``matmul_base(A, B, M)`` / ``matmul_ext(Ar, Ai, Br, Bi, d, M)``
    batched products mod M (extension elements are pairs a + b s with s^2 = d).
``sn_her(re, im, d, p, K)`` / ``sn_alt(A, p, K)``
    singular numbers (weakly decreasing) and a censoring flag per sample.
"""

from __future__ import annotations

import os

import numpy as np

from ..padicring import GOLDEN, MASK64, STREAM_SALT, _mix64

__all__ = ["BACKEND", "HAS_NUMBA", "get_backend", "init_states", "draw_limit"]

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def get_backend(name: str | None = None):
    name = (name or os.environ.get("PADIC_HL_BACKEND") or ("numba" if HAS_NUMBA else "numpy")).lower()
    if name == "numba":
        if not HAS_NUMBA:
            raise ImportError("PADIC_HL_BACKEND=numba but numba is not installed")
        from . import _numba as mod
    elif name == "numpy":
        from . import _numpy as mod
    else:
        raise ValueError(f"unknown backend {name!r}; use numba or numpy")
    return mod


BACKEND = get_backend().NAME


def _mix64_vec(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def init_states(seed: int, start: int, count: int) -> np.ndarray:
    """SplitMix64 states for streams start, ..., start+count-1 (matches padicring.stream_seed)."""
    base = np.uint64(_mix64((seed * GOLDEN + STREAM_SALT) & MASK64))
    streams = np.arange(start, start + count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix64_vec(base ^ _mix64_vec(streams + np.uint64(STREAM_SALT)))


def draw_limit(m: int) -> np.uint64:
    """Largest multiple of m not exceeding 2^64; draws at or above it are rejected."""
    return np.uint64((((1 << 64) // m) * m) & MASK64) if m & (m - 1) else np.uint64(0)
