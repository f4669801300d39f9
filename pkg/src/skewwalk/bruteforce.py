"""Exhaustive path enumeration, kept apart from the DP code as a ground truth.

Every one of the 2^k sign sequences is generated explicitly and weighted by the
product of its per-step kernel probabilities. Feasible up to k of about 22.
"""

import numpy as np

MAX_ENUM_STEPS = 22


def enumerate_paths(alpha, k):
    """All 2^k paths of length k from 0 and their probabilities.

    Returns ``(positions, probs)`` with ``positions`` of shape (2^k, k+1).
    """
    if k > MAX_ENUM_STEPS:
        raise ValueError(f"refusing to enumerate 2^{k} paths")
    codes = np.arange(2**k, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(k)) & 1
    signs = 2 * bits - 1
    positions = np.zeros((2**k, k + 1), dtype=np.int64)
    probs = np.ones(2**k)
    for i in range(k):
        here = positions[:, i]
        up = signs[:, i] == 1
        p_up = np.where(here == 0, alpha, 0.5)
        probs *= np.where(up, p_up, 1.0 - p_up)
        positions[:, i + 1] = here + signs[:, i]
    return positions, probs


def brute_pmf(alpha, k):
    """Law of S_k as a dict ``{m: probability}``."""
    positions, probs = enumerate_paths(alpha, k)
    end = positions[:, -1]
    out = {}
    for m in np.unique(end):
        out[int(m)] = float(probs[end == m].sum())
    return out


def brute_fourth_moment(alpha, j, k):
    """E (S_k - S_j)^4 by enumerating every path of length k."""
    positions, probs = enumerate_paths(alpha, k)
    inc = (positions[:, k] - positions[:, j]).astype(float)
    return float(np.dot(probs, inc**4))


def brute_weighted_fourth_moment(alpha, weights, start_step):
    """E (sum_i w_i * delta_{start_step + i})^4 by enumeration.

    ``weights`` are applied to consecutive increments beginning at ``start_step``.
    """
    weights = np.asarray(weights, dtype=float)
    k = start_step + weights.size
    positions, probs = enumerate_paths(alpha, k)
    deltas = np.diff(positions, axis=1)[:, start_step:].astype(float)
    y = deltas @ weights
    return float(np.dot(probs, y**4))
