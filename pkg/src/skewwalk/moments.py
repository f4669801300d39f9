"""Fourth moments of increments of the skew walk and of its rescaled interpolation.

Two independent routes are provided.

* Dynamic programming over the exact law (``fourth_moment_exact``,
  ``decomposition_terms``, ``fourth_moment_interp``). These are the reference
  implementations and cost O(d * range) per pair.
* A closed form used by the tightness scan. Started from z, the walk's even
  moments coincide with those of the simple walk, and its odd moments differ
  only through the expected time spent at 0, which depends on |z| alone::

      E_z D^4 = 3d^2 - 2d - (2a-1) z [12 W(|z|, d) + 4 (1 + z^2) L(|z|, d)]

  where D = S_d - z, L(x, d) = sum_{i<d} q_i(x), W(x, d) = sum_{i<d} (d-1-i) q_i(x)
  and q_i(x) = P(simple walk from x is at 0 at time i). Averaging over S_j makes
  the correction proportional to (2a-1)^2, so every grid pair costs one
  entry of a matrix product.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .lattice import as_param, exact_pmf_weights
from .rng import RngContract, as_contract

_BINOM = [[math.comb(r, q) for q in range(5)] for r in range(5)]

# Relative tolerance used to snap n*t onto the integer grid.
GRID_SNAP = 1e-9


@dataclass(frozen=True)
class GridPair:
    n: int
    j: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not (0 <= self.j < self.k):
            raise ValueError(f"need 0 <= j < k, got j={self.j}, k={self.k}")

    @property
    def s(self) -> float:
        return self.j / self.n

    @property
    def t(self) -> float:
        return self.k / self.n

    @property
    def d(self) -> int:
        return self.k - self.j


class DecompositionTerms(NamedTuple):
    diagonal: float
    square_square: float
    square_cross: float
    full_cross: float

    @property
    def total(self) -> float:
        return self.diagonal + self.square_square + self.square_cross + self.full_cross


@dataclass(frozen=True)
class MomentReport:
    pair: GridPair
    alpha: float
    fourth_moment: float
    ratio: float
    term_breakdown: DecompositionTerms


def _kernel(y: np.ndarray, alpha: float):
    up = np.where(y == 0, alpha, 0.5)
    return up, 1.0 - up


def _check_pair(j: int, k: int):
    if not (0 <= j < k):
        raise ValueError(f"need 0 <= j < k, got j={j}, k={k}")


def centered_moments_from(alpha: float, d: int, radius: int) -> np.ndarray:
    """``out[r, m + radius] = E_m (S_d - m)^r`` for r = 0..4 and |m| <= radius.

    Backward recursion on the first step: (S_d - m) = eps + (S_{d-1}' - (m + eps)).
    """
    R = radius + d
    y = np.arange(-R, R + 1)
    up, down = _kernel(y, alpha)
    c = np.zeros((5, y.size))
    c[0] = 1.0
    for _ in range(d):
        new = np.zeros_like(c)
        for r in range(5):
            acc_up = np.zeros(y.size - 2)
            acc_down = np.zeros(y.size - 2)
            for q in range(r + 1):
                coef = _BINOM[r][q]
                acc_up += coef * c[q, 2:]
                acc_down += coef * (-1) ** (r - q) * c[q, :-2]
            new[r, 1:-1] = up[1:-1] * acc_up + down[1:-1] * acc_down
        c = new  # entries within distance of the array edge are stale but never read
    return c[:, d : d + 2 * radius + 1]


def fourth_moment_exact(p, j: int, k: int) -> float:
    """E |S_k - S_j|^4 = sum_m P(S_j = m) E_m (S_{k-j} - m)^4."""
    p = as_param(p)
    _check_pair(j, k)
    pmf = exact_pmf_weights(p.alpha, j)
    c = centered_moments_from(p.alpha, k - j, j)
    return float(np.dot(pmf, c[4]))


def _elementary_dp(alpha: float, j: int, k: int):
    """Forward DP of E[e_r(deltas); S_i = y] for the increments j..k-1.

    Also tracks the power sum of delta^4 and the second elementary symmetric
    polynomial of the squares, so that no identity delta^2 = 1 is assumed.
    """
    R = k
    y = np.arange(-R, R + 1)
    up, down = _kernel(y, alpha)
    e = np.zeros((5, y.size))
    e[0, R - j : R + j + 1] = exact_pmf_weights(alpha, j)
    sq = np.zeros((3, y.size))  # e_0, e_1, e_2 of delta^2
    sq[0] = e[0]
    p4 = np.zeros(y.size)
    for _ in range(k - j):
        ne = np.zeros_like(e)
        nsq = np.zeros_like(sq)
        np4 = np.zeros_like(p4)
        for eps, w in ((1, up), (-1, down)):
            src = slice(0, -1) if eps == 1 else slice(1, None)
            dst = slice(1, None) if eps == 1 else slice(0, -1)
            ws = w[src]
            for r in range(5):
                moved = e[r, src] + (eps * e[r - 1, src] if r else 0.0)
                ne[r, dst] += ws * moved
            for r in range(3):
                moved = sq[r, src] + (sq[r - 1, src] if r else 0.0)  # eps^2 = 1
                nsq[r, dst] += ws * moved
            np4[dst] += ws * (p4[src] + e[0, src] * eps**4)
        e, sq, p4 = ne, nsq, np4
    return e.sum(axis=1), sq.sum(axis=1), p4.sum()


def decomposition_terms(p, j: int, k: int) -> DecompositionTerms:
    """Multinomial expansion of E (sum of increments j..k-1)^4 in four groups.

    diagonal      sum_i E d_i^4
    square_square 6 sum_{i<l} E d_i^2 d_l^2
    square_cross  4 sum_{i!=l} E d_i^3 d_l + 12 sum E d_i^2 d_l d_m, reduced with
                  d^3 = d and d^2 = 1 to (12 d - 16) sum_{l<m} E d_l d_m
    full_cross    24 sum_{a<b<c<e} E d_a d_b d_c d_e
    """
    p = as_param(p)
    _check_pair(j, k)
    d = k - j
    e, sq, p4 = _elementary_dp(p.alpha, j, k)
    return DecompositionTerms(
        diagonal=float(p4),
        square_square=float(6.0 * sq[2]),
        square_cross=float((12.0 * d - 16.0) * e[2]),
        full_cross=float(24.0 * e[4]),
    )


def moment_report(p, n: int, j: int, k: int) -> MomentReport:
    p = as_param(p)
    pair = GridPair(n, j, k)
    terms = decomposition_terms(p, j, k)
    m4 = fourth_moment_exact(p, j, k) / n**2
    return MomentReport(pair, p.alpha, m4, m4 / (pair.t - pair.s) ** 2, terms)


def _grid_split(n: int, t: float) -> tuple[int, float]:
    """Integer part and fractional part of n*t, snapping values within GRID_SNAP of an integer."""
    x = n * t
    r = round(x)
    if abs(x - r) <= GRID_SNAP * max(1.0, abs(x)):
        return int(r), 0.0
    a = math.floor(x)
    return a, x - a


def interp_value(path, n: int, t: float) -> float:
    """X_n(t) = (S_[nt] + (nt - [nt]) (S_[nt]+1 - S_[nt])) / sqrt(n)."""
    positions = path.positions if hasattr(path, "positions") else np.asarray(path)
    if t < 0:
        raise ValueError("t must be nonnegative")
    a, f = _grid_split(n, t)
    last = len(positions) - 1
    if a > last or (f > 0 and a + 1 > last):
        raise ValueError(f"t={t} lies beyond the simulated horizon {last / n}")
    val = float(positions[a])
    if f > 0:
        val += f * (positions[a + 1] - positions[a])
    return val / math.sqrt(n)


def _interp_weights(n: int, s: float, t: float):
    """First increment index and the interpolation weights on the increments it covers."""
    if not (0 <= s < t):
        raise ValueError("need 0 <= s < t")
    a, f = _grid_split(n, s)
    b, g = _grid_split(n, t)
    if a == b:
        return a, np.array([g - f])
    w = np.ones(b - a + (1 if g > 0 else 0))
    w[0] = 1.0 - f
    if g > 0:
        w[-1] = g
    return a, w


def weighted_fourth_moment(alpha: float, start: int, weights) -> float:
    """E (sum_i w_i delta_{start+i})^4 by a forward DP over (state, moments of the sum)."""
    weights = np.asarray(weights, dtype=float)
    R = start + weights.size
    y = np.arange(-R, R + 1)
    up, down = _kernel(y, alpha)
    m = np.zeros((5, y.size))
    m[0, R - start : R + start + 1] = exact_pmf_weights(alpha, start)
    for w_i in weights:
        new = np.zeros_like(m)
        for eps, kp in ((1, up), (-1, down)):
            src = slice(0, -1) if eps == 1 else slice(1, None)
            dst = slice(1, None) if eps == 1 else slice(0, -1)
            step = eps * w_i
            for r in range(5):
                acc = np.zeros(y.size - 1)
                for q in range(r + 1):
                    acc += _BINOM[r][q] * step ** (r - q) * m[q, src]
                new[r, dst] += kp[src] * acc
        m = new
    return float(m[4].sum())


def fourth_moment_interp(p, n: int, s: float, t: float) -> float:
    """E |X_n(t) - X_n(s)|^4 for arbitrary 0 <= s < t."""
    p = as_param(p)
    start, w = _interp_weights(n, s, t)
    return weighted_fourth_moment(p.alpha, start, w) / n**2


# ---------------------------------------------------------------------------
# closed-form tables


@dataclass(frozen=True, eq=False)
class ReturnTables:
    """q_i(x), L(x, d) and W(x, d) for 0 <= i, d <= N and 0 <= x <= N + 1.

    Arrays are indexed ``[time, x]``.
    """

    N: int
    q: np.ndarray
    local_time: np.ndarray
    weighted_local_time: np.ndarray


@lru_cache(maxsize=2)
def return_tables(N: int) -> ReturnTables:
    X = N + 2
    q = np.zeros((N + 1, X))
    row = np.zeros(X + 1)  # P(W_i = x) for x = 0..X, symmetric in x
    row[0] = 1.0
    for i in range(N + 1):
        q[i] = row[:X]
        nxt = np.empty_like(row)
        nxt[1:-1] = 0.5 * (row[:-2] + row[2:])
        nxt[0] = row[1]  # 0.5 * (P(W=-1) + P(W=1))
        nxt[-1] = 0.5 * row[-2]
        row = nxt
    L = np.zeros_like(q)
    np.cumsum(q[:-1], axis=0, out=L[1:])
    W = np.zeros_like(q)
    np.cumsum(L[:-1], axis=0, out=W[1:])
    for arr in (q, L, W):
        arr.setflags(write=False)
    return ReturnTables(N, q, L, W)


@lru_cache(maxsize=2)
def _grid_correction(N: int) -> np.ndarray:
    """C[j, d] with E(S_{j+d} - S_j)^4 = 3d^2 - 2d - (2a-1)^2 C[j, d]; valid for j + d <= N."""
    tb = return_tables(N)
    x = np.arange(1, N + 1, dtype=float)
    L = tb.local_time[:, 1 : N + 1]  # [d, x]
    W = tb.weighted_local_time[:, 1 : N + 1]
    G = (x * (12.0 * W + 4.0 * (1.0 + x * x) * L)).T  # [x, d]
    C = (2.0 * tb.q[:, 1 : N + 1]) @ G  # [j, d]
    C.setflags(write=False)
    return C


def grid_fourth_moments(alpha: float, N: int) -> np.ndarray:
    """M[j, d] = E(S_{j+d} - S_j)^4 for j + d <= N (NaN elsewhere and at d = 0)."""
    C = _grid_correction(N)
    d = np.arange(N + 1, dtype=float)
    M = 3.0 * d**2 - 2.0 * d - (2.0 * alpha - 1.0) ** 2 * C
    j = np.arange(N + 1)[:, None]
    M[(j + d[None, :] > N) | (d[None, :] == 0)] = np.nan
    return M


def _increment_moments_closed(alpha: float, z: np.ndarray, d: int, tb: ReturnTables):
    """E_z D^p for p = 0..4 and E_z[D^p delta_d] for p = 0..3, D = S_d - z."""
    b = 2.0 * alpha - 1.0
    x = np.abs(z)
    L = tb.local_time[d, x]
    W = tb.weighted_local_time[d, x]
    q = tb.q[d, x]
    zf = z.astype(float)
    plain = np.array(
        [
            np.ones_like(zf),
            b * L,
            d - 2.0 * zf * b * L,
            b * (3.0 * W + L + 3.0 * zf**2 * L),
            3.0 * d * d - 2.0 * d - b * zf * (12.0 * W + 4.0 * (1.0 + zf**2) * L),
        ]
    )
    with_step = np.array([b * (-zf) ** p * q for p in range(4)])
    return plain, with_step


def fourth_moment_interp_fast(alpha: float, n: int, s: float, t: float, tb: ReturnTables | None = None) -> float:
    """Closed-form counterpart of :func:`fourth_moment_interp`."""
    a, f = _grid_split(n, s)
    b, g = _grid_split(n, t)
    if not (0 <= s < t):
        raise ValueError("need 0 <= s < t")
    if a == b:
        return (g - f) ** 4 / n**2
    dd = b - a - 1
    if tb is None:
        tb = return_tables(max(a, dd) + 1)
    c = 1.0 - f
    y = np.arange(-a, a + 1)
    ay = np.abs(y)
    py = np.where(y > 0, 2.0 * alpha, np.where(y < 0, 2.0 * (1.0 - alpha), 1.0)) * tb.q[a, ay]
    up, down = _kernel(y, alpha)
    total = 0.0
    for eps, kp in ((1, up), (-1, down)):
        z = y + eps
        plain, with_step = _increment_moments_closed(alpha, z, dd, tb)
        # moments of D + g * delta_b, r = 0..4
        tail = []
        for r in range(5):
            acc = np.zeros(z.size)
            for qq in range(r + 1):
                coef = _BINOM[r][qq] * g**qq
                if coef == 0.0:
                    continue
                acc += coef * (plain[r - qq] if qq % 2 == 0 else with_step[r - qq])
            tail.append(acc)
        u = c * eps
        h = sum(_BINOM[4][r] * u ** (4 - r) * tail[r] for r in range(5))
        total += float(np.dot(py * kp, h))
    return total / n**2


# ---------------------------------------------------------------------------
# tightness scan


@dataclass
class ScaleResult:
    n: int
    sup_ratio: float
    j: int
    k: int
    fourth_moment: float
    nongrid_sup_ratio: float = float("nan")
    nongrid_argmax: tuple[float, float] = (float("nan"), float("nan"))


@dataclass
class ScanReport:
    alpha: float
    horizon: float
    scales: list[ScaleResult] = field(default_factory=list)

    @property
    def constant(self) -> float:
        """Empirical C_alpha: largest grid ratio over all scanned scales."""
        return max(s.sup_ratio for s in self.scales)

    @property
    def nongrid_constant(self) -> float:
        return max(s.nongrid_sup_ratio for s in self.scales)


def grid_sup(alpha: float, N: int, M: np.ndarray | None = None) -> tuple[float, int, int, float]:
    """Supremum over 0 <= j < k <= N of E(S_k - S_j)^4 / (k - j)^2 with its argmax.

    Returns ``(ratio, j, k, E(S_k - S_j)^4)``.
    """
    if M is None:
        M = grid_fourth_moments(alpha, N)
    d = np.arange(M.shape[1], dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = M / d**2
    sub = ratio[: N, 1 : N + 1]
    jj = np.arange(N)[:, None]
    dd = np.arange(1, N + 1)[None, :]
    sub = np.where(jj + dd <= N, sub, -np.inf)
    flat = int(np.argmax(sub))
    j, di = divmod(flat, N)
    dsel = di + 1
    return float(sub[j, di]), j, j + dsel, float(M[j, dsel])


def sample_nongrid_pairs(n: int, horizon: float, count: int, rng=None) -> np.ndarray:
    """Fixed-seed (s, t) pairs: s uniform, t - s log-uniform between 1/(20n) and the horizon."""
    gen = as_contract(rng).generator()
    out = np.empty((count, 2))
    filled = 0
    lo, hi = math.log(0.05 / n), math.log(horizon)
    while filled < count:
        m = 2 * (count - filled)
        s = gen.uniform(0.0, horizon, m)
        gap = np.exp(gen.uniform(lo, hi, m))
        t = s + gap
        ok = t <= horizon
        take = np.column_stack([s[ok], t[ok]])[: count - filled]
        out[filled : filled + len(take)] = take
        filled += len(take)
    return out


def _scan_one(alpha, n_list, horizon, nongrid, seed):
    N_max = int(math.floor(max(n_list) * horizon))
    M = grid_fourth_moments(alpha, N_max)
    tb = return_tables(N_max)
    report = ScanReport(alpha, horizon)
    for idx, n in enumerate(n_list):
        N = int(math.floor(n * horizon))
        ratio, j, k, m4 = grid_sup(alpha, N, M[: N + 1, : N + 1])
        res = ScaleResult(n, ratio, j, k, m4 / n**2)
        if nongrid:
            pairs = sample_nongrid_pairs(n, horizon, nongrid, RngContract(seed, idx))
            best, arg = -np.inf, (np.nan, np.nan)
            for s, t in pairs:
                r = fourth_moment_interp_fast(alpha, n, s, t, tb) / (t - s) ** 2
                if r > best:
                    best, arg = r, (float(s), float(t))
            res.nongrid_sup_ratio, res.nongrid_argmax = float(best), arg
        report.scales.append(res)
    return report


def tightness_scan(alphas, n_list, horizon: float = 1.0, nongrid: int = 1000, seed: int = 0, workers: int = 1):
    """Sup of E|X_n(t) - X_n(s)|^4 / (t - s)^2 over grid pairs, plus sampled non-grid pairs.

    ``alphas`` may be a single value or a sequence; a list of :class:`ScanReport`
    is returned in the same order. Non-grid samples for scale index i use
    stream ``(seed, i)``, so results do not depend on ``workers``.
    """
    single = np.isscalar(alphas) or hasattr(alphas, "alpha")
    alist = [as_param(a).alpha for a in ([alphas] if single else alphas)]
    n_list = [int(n) for n in n_list]
    if not n_list or min(n_list) < 1 or horizon * min(n_list) < 1:
        raise ValueError("scales must be positive and n * horizon >= 1")
    if workers > 1 and len(alist) > 1:
        # build the shared tables once before fanning out
        _grid_correction(int(math.floor(max(n_list) * horizon)))
        with ThreadPoolExecutor(workers) as ex:
            reports = list(ex.map(lambda a: _scan_one(a, n_list, horizon, nongrid, seed), alist))
    else:
        reports = [_scan_one(a, n_list, horizon, nongrid, seed) for a in alist]
    return reports[0] if single else reports
