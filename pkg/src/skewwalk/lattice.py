"""Exact laws of the skew random walk on the integer lattice.

The walk starts at 0. Off the origin it moves up or down with probability 1/2;
at the origin it moves up with probability ``alpha`` and down with ``1 - alpha``.
Laws are stored densely: ``weights[i]`` is the probability of the lattice point
``min_support + i``. Points of the wrong parity are kept as explicit zeros.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import stats

MASS_TOL = 1e-12

# Largest step count accepted by the dense DP (array of 2k+1 doubles, O(k^2) work).
MAX_STEPS = 2_000_000


class ResourceLimitError(RuntimeError):
    """Raised when a request exceeds the configured memory or work budget."""


@dataclass(frozen=True)
class SkewParam:
    """Skewness of the walk: probability of an up-step from the origin."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (0.0 < a < 1.0) or not np.isfinite(a):
            raise ValueError(f"alpha must lie in (0,1), got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    @property
    def drift_at_zero(self) -> float:
        return 2.0 * self.alpha - 1.0

    def mirror(self) -> "SkewParam":
        return SkewParam(1.0 - self.alpha)


def as_param(p) -> SkewParam:
    return p if isinstance(p, SkewParam) else SkewParam(p)


@dataclass(frozen=True, eq=False)
class LatticePmf:
    """Finite probability mass function on ``min_support, min_support+1, ...``."""

    min_support: int
    weights: np.ndarray
    step_index: int

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "min_support", int(self.min_support))
        object.__setattr__(self, "step_index", int(self.step_index))
        self._check()

    def _check(self):
        w, k = self.weights, self.step_index
        if k < 0:
            raise ValueError("step_index must be nonnegative")
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty 1-d array")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        total = w.sum()
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1")
        pos = self.points[w > 0]
        if pos.size and (pos.min() < -k or pos.max() > k):
            raise ValueError(f"support exceeds [-{k}, {k}]")
        if np.any((pos - k) % 2 != 0):
            raise ValueError("positive weight at a point of the wrong parity")

    @property
    def max_support(self) -> int:
        return self.min_support + self.weights.size - 1

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.min_support, self.max_support + 1)

    def __getitem__(self, m: int) -> float:
        i = int(m) - self.min_support
        if 0 <= i < self.weights.size:
            return float(self.weights[i])
        return 0.0

    def prob(self, m) -> np.ndarray:
        """Vectorised lookup; zero outside the stored range."""
        m = np.asarray(m)
        i = m - self.min_support
        inside = (i >= 0) & (i < self.weights.size)
        out = np.zeros(m.shape, dtype=float)
        out[inside] = self.weights[i[inside]]
        return out

    def to_dict(self) -> dict[int, float]:
        """Points with positive mass only."""
        return {int(m): float(w) for m, w in zip(self.points, self.weights) if w > 0}

    def moment(self, order: int) -> float:
        return float(np.dot(self.points.astype(float) ** order, self.weights))

    def cdf(self) -> tuple[np.ndarray, np.ndarray]:
        """Atoms with positive mass and the CDF evaluated at each."""
        mask = self.weights > 0
        return self.points[mask], np.cumsum(self.weights)[mask]

    def max_abs_diff(self, other: "LatticePmf") -> float:
        lo = min(self.min_support, other.min_support)
        hi = max(self.max_support, other.max_support)
        m = np.arange(lo, hi + 1)
        return float(np.max(np.abs(self.prob(m) - other.prob(m))))

    def __repr__(self):
        return f"LatticePmf(k={self.step_index}, {self.to_dict()!r})"


def delta(m: int = 0) -> LatticePmf:
    """Point mass at ``m``; step_index is |m|, the first time the walk can be there."""
    return LatticePmf(m, np.array([1.0]), abs(m))


def _step_weights(w: np.ndarray, min_support: int, alpha: float) -> np.ndarray:
    left = 0.5 * w
    right = 0.5 * w
    z = -min_support
    if 0 <= z < w.size:
        left[z] = (1.0 - alpha) * w[z]
        right[z] = alpha * w[z]
    out = np.zeros(w.size + 2)
    out[:-2] += left
    out[2:] += right
    return out


def step(pmf: LatticePmf, p) -> LatticePmf:
    """Law after one transition of the skew kernel."""
    p = as_param(p)
    w = _step_weights(pmf.weights, pmf.min_support, p.alpha)
    return LatticePmf(pmf.min_support - 1, w, pmf.step_index + 1)


def _check_budget(k: int):
    if k < 0:
        raise ValueError("step count must be nonnegative")
    if k > MAX_STEPS:
        raise ResourceLimitError(f"k={k} exceeds the step budget of {MAX_STEPS}")


def exact_pmf_weights(alpha: float, k: int) -> np.ndarray:
    """Dense weights on ``-k..k`` of the law of S_k (no validation)."""
    _check_budget(k)
    w = np.zeros(2 * k + 1)
    w[k] = 1.0
    # evolve in place on a fixed window; mass never leaves [-k, k]
    for i in range(k):
        lo, hi = k - i, k + i  # current support window
        cur = w[lo : hi + 1].copy()
        w[lo : hi + 1] = 0.0
        left = 0.5 * cur
        right = 0.5 * cur
        left[i] = (1.0 - alpha) * cur[i]
        right[i] = alpha * cur[i]
        w[lo - 1 : hi] += left
        w[lo + 1 : hi + 2] += right
    return w


def exact_pmf(p, k: int) -> LatticePmf:
    """Exact law of S_k started at 0, by k applications of the kernel."""
    p = as_param(p)
    return LatticePmf(-k, exact_pmf_weights(p.alpha, k), k)


def ssrw_weights(k: int) -> np.ndarray:
    """Law of the simple symmetric walk on ``-k..k`` in binomial closed form."""
    _check_budget(k)
    m = np.arange(-k, k + 1)
    w = np.zeros(2 * k + 1)
    even = (m + k) % 2 == 0
    w[even] = stats.binom.pmf((m[even] + k) // 2, k, 0.5)
    return w


def reflected_pmf(k: int) -> LatticePmf:
    """Law of |S_k| for the simple symmetric walk, by folding its law at 0."""
    w = ssrw_weights(k)
    folded = w[k:].copy()
    folded[1:] += w[:k][::-1]
    return LatticePmf(0, folded, k)


def factorized_pmf(p, k: int) -> LatticePmf:
    """Law of S_k built from |S_k|: split each modulus by the excursion sign."""
    p = as_param(p)
    r = reflected_pmf(k).weights
    w = np.empty(2 * k + 1)
    w[k] = r[0]
    w[k + 1 :] = p.alpha * r[1:]
    w[:k] = ((1.0 - p.alpha) * r[1:])[::-1]
    return LatticePmf(-k, w, k)


class IncrementMoments(NamedTuple):
    mean_at_zero: float
    mean_off_zero: float
    second_moment: float


def kernel_rows(m: np.ndarray, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Up and down probabilities of the kernel at each state in ``m``."""
    m = np.asarray(m)
    up = np.where(m == 0, alpha, 0.5)
    down = np.where(m == 0, 1.0 - alpha, 0.5)
    return up, down


def conditional_increment_moments(pmf: LatticePmf, p) -> IncrementMoments:
    """Conditional mean and second moment of the next increment, from the kernel.

    The off-zero mean is averaged over the mass ``pmf`` puts off the origin,
    the second moment over all of ``pmf``.
    """
    p = as_param(p)
    up0, down0 = kernel_rows(np.array([0]), p.alpha)
    mean_at_zero = float(up0[0] - down0[0])

    pts, w = pmf.points, pmf.weights
    up, down = kernel_rows(pts, p.alpha)
    off = pts != 0
    off_mass = w[off].sum()
    mean_off = float(np.dot(w[off], up[off] - down[off]) / off_mass) if off_mass > 0 else 0.0
    second = float(np.dot(w, up + down) / w.sum())
    return IncrementMoments(mean_at_zero, mean_off, second)
