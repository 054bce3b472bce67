"""Exhaustive-search kernel with a compiled core and a numpy fallback.

The 2^n integer-bid enumeration dominates the runtime of scenario-model
optimization, so it is implemented twice: a Cython extension compiled at
install time, and a chunked numpy fallback selected automatically when the
extension is unavailable (or when ``SBO_PURE_PYTHON=1`` is set).  Both apply
the same tie-break: higher value, then fewer keywords, then lexicographically
smaller bid vector.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from sbo._bruteforce import best_integer_bids_native

    HAVE_NATIVE = True
except ImportError:  # pure-Python install; fall back to numpy
    best_integer_bids_native = None
    HAVE_NATIVE = False

_CHUNK_BITS = 14  # masks per fallback chunk: 2^14


def _lex_rank(masks: np.ndarray, n: int) -> np.ndarray:
    """Bit-reversed mask, so that smaller rank = lexicographically smaller bids."""
    rank = np.zeros_like(masks)
    for i in range(n):
        rank |= ((masks >> i) & 1) << (n - 1 - i)
    return rank


def best_integer_bids_python(clicks, costs, probs, budget: float):
    """Numpy enumeration of all 2^n integer bid vectors."""
    clicks = np.ascontiguousarray(clicks, dtype=float)
    costs = np.ascontiguousarray(costs, dtype=float)
    probs = np.ascontiguousarray(probs, dtype=float)
    n = clicks.shape[1]
    best = None  # (value, popcount, lex_rank, mask)
    for start in range(0, 1 << n, 1 << _CHUNK_BITS):
        masks = np.arange(start, min(start + (1 << _CHUNK_BITS), 1 << n), dtype=np.int64)
        bits = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
        clk = bits @ clicks.T
        cost = bits @ costs.T
        vals = (clk / np.maximum(1.0, cost / budget)) @ probs
        pops = np.sum(bits, axis=1).astype(np.int64)
        order = np.lexsort((_lex_rank(masks, n), pops, -vals))
        j = order[0]
        cand = (float(vals[j]), int(pops[j]), int(_lex_rank(masks[j : j + 1], n)[0]), int(masks[j]))
        if best is None or (-cand[0], cand[1], cand[2]) < (-best[0], best[1], best[2]):
            best = cand
    return best[3], best[0]


def best_integer_bids(clicks, costs, probs, budget: float, force_python: bool = False):
    """Best integer bid mask and its expected value over the given scenarios.

    ``clicks`` and ``costs`` are (scenarios, keywords) arrays; ``probs`` sums
    to 1.  Dispatches to the compiled core when it is available.
    """
    use_python = (
        force_python or not HAVE_NATIVE or os.environ.get("SBO_PURE_PYTHON") == "1"
    )
    if use_python:
        return best_integer_bids_python(clicks, costs, probs, budget)
    clicks = np.ascontiguousarray(clicks, dtype=float)
    costs = np.ascontiguousarray(costs, dtype=float)
    probs = np.ascontiguousarray(probs, dtype=float)
    mask, value = best_integer_bids_native(clicks, costs, probs, budget)
    return int(mask), float(value)
