"""Return probabilities of the simple walk, their convolutions and partial sums.

``g(k)`` is the probability that the simple symmetric walk sits at 0 after k
steps. Its generating function is ``(1 - t^2)^(-1/2)``, so the r-fold
convolution of g has generating function ``(1 - t^2)^(-r/2)``. In particular
``(g*g)(2i) = 1`` and ``(g*g*g*g)(2i) = i + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal
from scipy.special import gamma

from .lattice import as_param

# Above this length convolutions go through the FFT.
DIRECT_CONV_MAX = 4096


@dataclass(frozen=True, eq=False)
class ConvSeq:
    """Nonnegative sequence indexed by 0..kmax."""

    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("values must be a nonempty 1-d array")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError(f"sequence {self.label!r} has negative or non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def kmax(self) -> int:
        return self.values.size - 1

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return self.values.size


def g_seq(kmax: int) -> ConvSeq:
    """g(2i) = C(2i, i) 4^-i by the recurrence g(2i) = g(2i-2)(2i-1)/(2i); g(odd) = 0."""
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    v = np.zeros(kmax + 1)
    i = np.arange(1, kmax // 2 + 1)
    v[0] = 1.0
    v[2::2] = np.cumprod((2 * i - 1) / (2 * i))
    return ConvSeq(v, "g")


def convolve(a: ConvSeq, b: ConvSeq, label: str | None = None) -> ConvSeq:
    """Cauchy product truncated to the shorter index range."""
    n = min(len(a), len(b))
    method = "direct" if n <= DIRECT_CONV_MAX else "fft"
    out = signal.convolve(a.values[:n], b.values[:n], method=method)[:n]
    if method == "fft":
        # FFT round-off leaves ~1e-16-sized negatives where the product is 0
        out = np.maximum(out, 0.0)
    return ConvSeq(out, label if label is not None else f"{a.label}*{b.label}")


def convolution_power(s: ConvSeq, r: int, label: str | None = None) -> ConvSeq:
    if r < 1:
        raise ValueError("r must be at least 1")
    out = s
    for _ in range(r - 1):
        out = convolve(out, s)
    return ConvSeq(out.values, label if label is not None else f"{s.label}^*{r}")


def mu_seq(kmax: int) -> ConvSeq:
    g = g_seq(kmax)
    return convolve(g, g, "mu")


def nu_seq(kmax: int) -> ConvSeq:
    mu = mu_seq(kmax)
    return convolve(mu, mu, "nu")


def partial_sums(s: ConvSeq) -> ConvSeq:
    return ConvSeq(np.cumsum(s.values), f"sum {s.label}")


def gen_fn_tail_bound(s: ConvSeq, t: float) -> float:
    """Bound on the omitted tail when the entries are nonincreasing (true for g)."""
    return float(s.values[-1] * t ** s.kmax / (1.0 - t))


def gen_fn_eval(s: ConvSeq, t: float, tol: float | None = None) -> float:
    """Truncated power series sum_k s(k) t^k for 0 <= t < 1.

    With ``tol`` given, raises if the tail bound ``s(kmax) t^kmax / (1-t)``
    exceeds it.
    """
    if not (0.0 <= t < 1.0):
        raise ValueError(f"t must lie in [0, 1), got {t!r}")
    if tol is not None and gen_fn_tail_bound(s, t) > tol:
        raise ValueError(f"kmax={s.kmax} terms cannot reach tolerance {tol} at t={t}")
    powers = t ** np.arange(len(s), dtype=float)
    return float(np.dot(s.values, powers))


def tauberian_ratio(s: ConvSeq, theta: float, c: float) -> np.ndarray:
    """Partial sums divided by the Karamata prediction ``c n^theta / Gamma(theta + 1)``.

    ``c`` is the constant value of the slowly varying factor, i.e. the
    generating function behaves like ``c (1 - t)^-theta`` as t -> 1. Entry 0 is
    NaN (no prediction at n = 0). Returns a plain array because of that marker.
    """
    if theta < 0 or c <= 0:
        raise ValueError("need theta >= 0 and c > 0")
    n = np.arange(len(s), dtype=float)
    ps = np.cumsum(s.values)
    out = np.full(len(s), np.nan)
    out[1:] = ps[1:] / (c * n[1:] ** theta / gamma(theta + 1.0))
    return out


def _positive_gaps(d: int) -> np.ndarray:
    g = g_seq(d).values.copy()
    g[0] = 0.0
    return g


def a_sum(p, d: int) -> float:
    """Sum over 1 <= i1 < i2 < i3 <= d of (2a-1)^2 g(i1) g(i2-i1).

    i3 only contributes a count of d - i2, so the triple sum collapses to a
    weighted partial sum of the self-convolution of g restricted to gaps >= 1.
    """
    p = as_param(p)
    if d < 1:
        raise ValueError("d must be at least 1")
    gp = ConvSeq(_positive_gaps(d), "g+")
    pair = convolve(gp, gp).values
    i2 = np.arange(d + 1)
    return float(p.drift_at_zero**2 * np.dot(d - i2, pair))


def b_sum(p, d: int) -> float:
    """Sum over 1 <= i1 < i2 < i3 < i4 <= d of (2a-1)^4 g(i1)g(i2-i1)g(i3-i2)g(i4-i3).

    Equals the partial sum up to d of the fourfold self-convolution of g
    restricted to gaps >= 1.
    """
    p = as_param(p)
    if d < 1:
        raise ValueError("d must be at least 1")
    gp = ConvSeq(_positive_gaps(d), "g+")
    quad = convolution_power(gp, 4).values
    return float(p.drift_at_zero**4 * quad.sum())


def brute_a_sum(alpha: float, d: int) -> float:
    """Triple loop over all index triples; test oracle for :func:`a_sum`."""
    g = [math.comb(k, k // 2) / 2.0**k if k % 2 == 0 else 0.0 for k in range(d + 1)]
    c = (2 * alpha - 1) ** 2
    total = 0.0
    for i1 in range(1, d + 1):
        for i2 in range(i1 + 1, d + 1):
            for _ in range(i2 + 1, d + 1):
                total += c * g[i1] * g[i2 - i1]
    return total


def brute_b_sum(alpha: float, d: int) -> float:
    """Quadruple loop over all index quadruples; test oracle for :func:`b_sum`."""
    g = [math.comb(k, k // 2) / 2.0**k if k % 2 == 0 else 0.0 for k in range(d + 1)]
    c = (2 * alpha - 1) ** 4
    total = 0.0
    for i1 in range(1, d + 1):
        for i2 in range(i1 + 1, d + 1):
            for i3 in range(i2 + 1, d + 1):
                for i4 in range(i3 + 1, d + 1):
                    total += c * g[i1] * g[i2 - i1] * g[i3 - i2] * g[i4 - i3]
    return total


def lemma_constant(alphas, d_max: int) -> tuple[int, float]:
    """Smallest positive integer C with a_sum, b_sum <= C d^2 for all 1 <= d <= d_max.

    Returns ``(C, sup_ratio)``. Both sums come from one pass of cumulative
    convolutions so every d is covered.
    """
    gp = ConvSeq(_positive_gaps(d_max), "g+")
    pair = convolve(gp, gp).values
    quad = convolution_power(gp, 4).values
    d = np.arange(1, d_max + 1, dtype=float)
    # sum_{i2<=d} (d - i2) pair(i2) = d*P0(d) - P1(d)
    p0 = np.cumsum(pair)[1:]
    p1 = np.cumsum(np.arange(d_max + 1) * pair)[1:]
    a_base = d * p0 - p1
    b_base = np.cumsum(quad)[1:]
    sup = 0.0
    for alpha in alphas:
        c = (2 * alpha - 1) ** 2
        sup = max(sup, float(np.max(c * a_base / d**2)), float(np.max(c * c * b_base / d**2)))
    return max(1, math.ceil(sup)), sup
