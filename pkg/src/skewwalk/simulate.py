"""Monte Carlo sampling of skew walk paths and comparison with the skew Brownian limit.

Two samplers are provided and are expected to agree in law:

* ``direct``: step by step from the kernel.
* ``excursion``: a reflected simple walk |W| with an independent sign drawn
  every time it leaves 0 (+ with probability alpha). The last, possibly
  unfinished, excursion also gets a sign.

Batch runs are split into chunks of ``chunk_size`` replicates. Chunk ``c``
uses substream ``c`` of the caller's :class:`RngContract`, so output depends on
``(seed, chunk_size)`` only, never on the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import ndtr

from .lattice import LatticePmf, as_param, exact_pmf
from .rng import RngContract, as_contract

DEFAULT_CHUNK = 1 << 16
SAMPLERS = ("direct", "excursion")


@dataclass(frozen=True, eq=False)
class PathSample:
    positions: np.ndarray
    alpha: float
    seed: int
    sampler_id: str

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.int64)
        if pos.ndim != 1 or pos.size == 0 or pos[0] != 0:
            raise ValueError("a path must start at 0")
        if np.any(np.abs(np.diff(pos)) != 1):
            raise ValueError("path increments must be +-1")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def n(self) -> int:
        return self.positions.size - 1


def _check_alpha_sampler(alpha: float, allow_degenerate: bool) -> float:
    if allow_degenerate:
        if not 0.0 <= alpha <= 1.0:
            raise ValueError("alpha must lie in [0,1]")
        return float(alpha)
    return as_param(alpha).alpha


STEP_BLOCK = 256


def _stream_chunk(alpha: float, n: int, size: int, gen: np.random.Generator, sampler: str,
                  times: np.ndarray) -> np.ndarray:
    """Run ``size`` walks for n steps, keeping only the positions at ``times``.

    Uniforms are drawn in blocks of STEP_BLOCK steps, so memory is
    O(size * STEP_BLOCK) whatever n is. The excursion sampler runs the reflected
    chain (0 -> 1, else a fair coin) and carries the sign of the current excursion.
    """
    want = np.zeros(n + 1, dtype=bool)
    want[times] = True
    slot = {int(t): i for i, t in enumerate(times)}
    out = np.zeros((size, len(times)), dtype=np.int32)
    x = np.zeros(size, dtype=np.int32)  # signed position for direct, |S| for excursion
    sign = np.ones(size, dtype=np.int32)
    for i0 in range(0, n, STEP_BLOCK):
        b = min(STEP_BLOCK, n - i0)
        u = gen.random((b, size))
        v = gen.random((b, size)) if sampler == "excursion" else None
        for r in range(b):
            at0 = x == 0
            if sampler == "direct":
                x += np.where(u[r] < np.where(at0, alpha, 0.5), 1, -1).astype(np.int32)
            else:
                sign = np.where(at0, np.where(v[r] < alpha, 1, -1), sign).astype(np.int32)
                x = np.where(at0, 1, x + np.where(u[r] < 0.5, 1, -1)).astype(np.int32)
            t = i0 + r + 1
            if want[t]:
                out[:, slot[t]] = x if sampler == "direct" else sign * x
    return out


def _direct_single(alpha: float, u: np.ndarray) -> np.ndarray:
    pos = np.zeros(u.size + 1, dtype=np.int64)
    x = 0
    for i, ui in enumerate(u.tolist()):
        if x == 0:
            x = 1 if ui < alpha else -1
        else:
            x = x + 1 if ui < 0.5 else x - 1
        pos[i + 1] = x
    return pos


def _excursion_batch(alpha: float, coin: np.ndarray, sign_u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Signed paths and the underlying reflected walks, shapes (reps, n+1).

    ``coin`` drives the simple walk; ``sign_u[:, i]`` is consulted only when the
    reflected walk is at 0 at time i.
    """
    reps, n = coin.shape
    steps = np.where(coin < 0.5, 1, -1).astype(np.int32)
    refl = np.zeros((reps, n + 1), dtype=np.int32)
    np.cumsum(steps, axis=1, out=refl[:, 1:])
    np.abs(refl, out=refl)
    # time of the most recent visit to 0 before each step
    idx = np.where(refl[:, :-1] == 0, np.arange(n, dtype=np.int32), 0)
    np.maximum.accumulate(idx, axis=1, out=idx)
    sign = np.where(sign_u < alpha, 1, -1).astype(np.int32)
    exc_sign = np.take_along_axis(sign, idx, axis=1)
    out = np.zeros_like(refl)
    out[:, 1:] = exc_sign * refl[:, 1:]
    return out, refl


def sample_path_direct(p, n: int, rng=None) -> PathSample:
    """One path of length n drawn step by step from the kernel."""
    alpha = as_param(p).alpha
    if n < 0:
        raise ValueError("n must be nonnegative")
    rc = as_contract(rng)
    u = rc.generator().random(n)
    return PathSample(_direct_single(alpha, u), alpha, rc.master_seed, "direct")


def sample_path_excursion(p, n: int, rng=None, *, allow_degenerate: bool = False, return_reflected: bool = False):
    """One path of length n built from a reflected walk and excursion signs.

    ``allow_degenerate`` admits alpha in {0, 1}, used to check the construction.
    With ``return_reflected`` the reflected walk is returned alongside.
    """
    alpha = _check_alpha_sampler(float(getattr(p, "alpha", p)), allow_degenerate)
    if n < 0:
        raise ValueError("n must be nonnegative")
    rc = as_contract(rng)
    gen = rc.generator()
    coin = gen.random((1, n))
    sign_u = gen.random((1, n))
    path, refl = _excursion_batch(alpha, coin, sign_u)
    sample = PathSample(path[0], alpha, rc.master_seed, "excursion")
    return (sample, refl[0]) if return_reflected else sample


def sample_paths(p, n: int, replicates: int, rng=None, sampler: str = "direct", *,
                 chunk_size: int = DEFAULT_CHUNK, workers: int = 1, times=None) -> np.ndarray:
    """Positions of ``replicates`` independent paths.

    Returns an int32 array of shape (replicates, len(times)); ``times`` defaults
    to every time 0..n.
    """
    alpha = as_param(p).alpha
    if sampler not in SAMPLERS:
        raise ValueError(f"unknown sampler {sampler!r}")
    if replicates < 1 or n < 0:
        raise ValueError("need replicates >= 1 and n >= 0")
    times = np.arange(n + 1) if times is None else np.asarray(times, dtype=int)
    rc = as_contract(rng)
    nchunks = math.ceil(replicates / chunk_size)

    def run(c):
        size = min(chunk_size, replicates - c * chunk_size)
        gen = rc.substream(c).generator()
        return _stream_chunk(alpha, n, size, gen, sampler, times)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            chunks = list(ex.map(run, range(nchunks)))
    else:
        chunks = [run(c) for c in range(nchunks)]
    return np.concatenate(chunks, axis=0)


def sample_endpoints(p, k: int, replicates: int, rng=None, sampler: str = "direct", **kw) -> np.ndarray:
    return sample_paths(p, k, replicates, rng, sampler, times=[k], **kw)[:, 0]


def mc_fourth_moment(p, n: int, j: int, k: int, replicates: int, rng=None, sampler: str = "direct", **kw):
    """Sample mean and standard error of |S_k - S_j|^4.

    ``n`` is the scale of the rescaled process and does not enter the integer
    increment; it is accepted to keep call sites uniform with the exact engine.
    """
    if replicates < 2:
        raise ValueError("need at least 2 replicates")
    if not 0 <= j < k:
        raise ValueError("need 0 <= j < k")
    pos = sample_paths(p, k, replicates, rng, sampler, times=[j, k], **kw)
    x = (pos[:, 1] - pos[:, 0]).astype(float) ** 4
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(replicates))


def mc_fourth_moment_interp(p, n: int, s: float, t: float, replicates: int, rng=None, **kw):
    """Monte Carlo E|X_n(t) - X_n(s)|^4 with its standard error."""
    from .moments import _interp_weights

    start, w = _interp_weights(n, s, t)
    last = start + w.size
    pos = sample_paths(p, last, replicates, rng, times=np.arange(start, last + 1), **kw)
    y = np.diff(pos, axis=1).astype(float) @ w
    x = y**4 / n**2
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(replicates))


def up_fraction_at_zero(path: PathSample) -> tuple[float, int]:
    """Fraction of departures from 0 that go up, and the number of departures."""
    pos = path.positions
    at0 = pos[:-1] == 0
    n0 = int(at0.sum())
    ups = int((pos[1:][at0] == 1).sum())
    return (ups / n0 if n0 else float("nan")), n0


def skew_bm_cdf(p, t: float, y):
    """Marginal CDF of skew Brownian motion at time t started from 0."""
    alpha = as_param(p).alpha
    if t <= 0:
        raise ValueError("t must be positive")
    z = np.asarray(y, dtype=float) / math.sqrt(t)
    phi = ndtr(z)
    out = np.where(z < 0, 2.0 * (1.0 - alpha) * phi, (1.0 - alpha) + alpha * (2.0 * phi - 1.0))
    return out if out.ndim else float(out)


def _ks_lattice(points: np.ndarray, cdf_right: np.ndarray, scale: float, F) -> float:
    """Sup distance between a step CDF with atoms ``points`` and a continuous F."""
    x = points / scale
    Fx = F(x)
    cdf_left = np.concatenate([[0.0], cdf_right[:-1]])
    return float(max(np.max(np.abs(cdf_right - Fx)), np.max(np.abs(cdf_left - Fx))))


def ks_statistic(p, n: int, t: float = 1.0, mode: str = "exact", rng=None, replicates: int = 0, **kw) -> float:
    """KS distance between the law of X_n(t) and the skew Brownian marginal at t."""
    p = as_param(p)
    k = round(n * t)
    if abs(n * t - k) > 1e-9 or k < 1:
        raise ValueError("n*t must be a positive integer")
    F = lambda x: skew_bm_cdf(p, t, x)  # noqa: E731
    scale = math.sqrt(n)
    if mode == "exact":
        pts, cdf = exact_pmf(p, k).cdf()
        return _ks_lattice(pts, cdf, scale, F)
    if mode == "empirical":
        if replicates < 1:
            raise ValueError("empirical mode needs replicates >= 1")
        ends = sample_endpoints(p, k, replicates, rng, **kw)
        pts, counts = np.unique(ends, return_counts=True)
        return _ks_lattice(pts.astype(float), np.cumsum(counts) / replicates, scale, F)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# chi-square checks


def _pool(expected: np.ndarray, *observed: np.ndarray, min_expected: float = 5.0):
    """Merge adjacent cells until every merged expected count reaches ``min_expected``."""
    groups, acc = [], []
    run = 0.0
    for i, e in enumerate(expected):
        acc.append(i)
        run += e
        if run >= min_expected:
            groups.append(acc)
            acc, run = [], 0.0
    if acc:
        if groups:
            groups[-1].extend(acc)
        else:
            groups.append(acc)
    pooled_e = np.array([expected[g].sum() for g in groups])
    pooled_o = [np.array([o[g].sum() for g in groups]) for o in observed]
    return pooled_e, pooled_o


def chisquare_vs_pmf(samples: np.ndarray, pmf: LatticePmf, min_expected: float = 5.0):
    """Goodness of fit of integer samples to ``pmf``; returns ``(statistic, p_value)``."""
    pts = pmf.points[pmf.weights > 0]
    probs = pmf.weights[pmf.weights > 0]
    if np.any(~np.isin(samples, pts)):
        return float("inf"), 0.0
    counts = np.searchsorted(pts, samples)
    obs = np.bincount(counts, minlength=pts.size).astype(float)
    exp = probs * samples.size
    pe, (po,) = _pool(exp, obs, min_expected=min_expected)
    pe *= po.sum() / pe.sum()
    res = stats.chisquare(po, pe)
    return float(res.statistic), float(res.pvalue)


def chisquare_two_sample(a: np.ndarray, b: np.ndarray, min_expected: float = 5.0):
    """Homogeneity test of two integer samples; returns ``(statistic, p_value)``."""
    pts = np.union1d(a, b)
    ca = np.bincount(np.searchsorted(pts, a), minlength=pts.size).astype(float)
    cb = np.bincount(np.searchsorted(pts, b), minlength=pts.size).astype(float)
    pooled_exp = (ca + cb) * min(a.size, b.size) / (a.size + b.size)
    _, (pa, pb) = _pool(pooled_exp, ca, cb, min_expected=min_expected)
    res = stats.chi2_contingency(np.vstack([pa, pb]), correction=False)
    return float(res.statistic), float(res.pvalue)
