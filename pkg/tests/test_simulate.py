import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewwalk.lattice import exact_pmf, reflected_pmf
from skewwalk.moments import fourth_moment_exact, fourth_moment_interp
from skewwalk.rng import RngContract
from skewwalk.simulate import (
    PathSample,
    chisquare_two_sample,
    chisquare_vs_pmf,
    ks_statistic,
    mc_fourth_moment,
    mc_fourth_moment_interp,
    sample_endpoints,
    sample_path_direct,
    sample_path_excursion,
    sample_paths,
    skew_bm_cdf,
    up_fraction_at_zero,
)


def test_zero_length_path():
    for path in (sample_path_direct(0.3, 0, 1), sample_path_excursion(0.3, 0, 1)):
        assert path.positions.tolist() == [0]
        assert path.n == 0


def test_path_validation():
    with pytest.raises(ValueError):
        PathSample(np.array([1, 2]), 0.5, 0, "direct")
    with pytest.raises(ValueError):
        PathSample(np.array([0, 2]), 0.5, 0, "direct")
    with pytest.raises(ValueError):
        sample_path_direct(1.0, 5)


def test_determinism():
    a = sample_path_direct(0.7, 500, RngContract(9, 2))
    b = sample_path_direct(0.7, 500, RngContract(9, 2))
    c = sample_path_direct(0.7, 500, RngContract(9, 3))
    assert np.array_equal(a.positions, b.positions)
    assert not np.array_equal(a.positions, c.positions)
    x = sample_paths(0.4, 30, 1000, 5, "excursion")
    y = sample_paths(0.4, 30, 1000, 5, "excursion")
    assert np.array_equal(x, y)


def test_up_fraction_long_path():
    path = sample_path_direct(0.7, 10**6, 5)
    frac, n0 = up_fraction_at_zero(path)
    assert n0 > 100
    assert abs(frac - 0.7) <= 3 * math.sqrt(0.21 / n0)


def test_degenerate_excursion_signs():
    path = sample_path_excursion(1.0, 2000, 3, allow_degenerate=True)
    assert path.positions.min() >= 0
    path = sample_path_excursion(0.0, 2000, 3, allow_degenerate=True)
    assert path.positions.max() <= 0
    with pytest.raises(ValueError):
        sample_path_excursion(1.0, 10, 3)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 0.99), st.integers(0, 300), st.integers(0, 2**32))
def test_modulus_is_reflected_walk(a, n, seed):
    path, refl = sample_path_excursion(a, n, seed, return_reflected=True)
    assert np.array_equal(np.abs(path.positions), refl)
    assert np.all(np.abs(np.diff(refl)) == 1)


def test_mc_fourth_moment_symmetric():
    mean, se = mc_fourth_moment(0.5, 2, 0, 2, 200_000, 11)
    assert abs(mean - 8.0) <= 4 * se


@pytest.mark.parametrize("sampler", ["direct", "excursion"])
def test_mc_fourth_moment_skew(sampler):
    exact = fourth_moment_exact(0.7, 3, 9)
    mean, se = mc_fourth_moment(0.7, 9, 3, 9, 400_000, 7, sampler)
    assert abs(mean - exact) <= 4 * se


def test_mc_fourth_moment_small_sample():
    mean, se = mc_fourth_moment(0.3, 4, 0, 4, 2, 1)
    assert np.isfinite(mean) and np.isfinite(se)
    with pytest.raises(ValueError):
        mc_fourth_moment(0.3, 4, 0, 4, 1, 1)


def test_mc_interp_matches_exact():
    n, s, t = 8, 0.3, 0.8
    exact = fourth_moment_interp(0.7, n, s, t)
    mean, se = mc_fourth_moment_interp(0.7, n, s, t, 10**6, 13)
    assert abs(mean - exact) <= 3 * se


def test_skew_bm_cdf():
    y = np.linspace(-6, 6, 101)
    for a in (0.1, 0.5, 0.9):
        F = skew_bm_cdf(a, 1.0, y)
        assert np.all(np.diff(F) >= 0)
        assert F[0] < 1e-8 and F[-1] > 1 - 1e-8
        assert skew_bm_cdf(a, 2.0, 0.0) == pytest.approx(1 - a)
    # symmetric case reduces to the normal CDF
    assert skew_bm_cdf(0.5, 1.0, 1.0) == pytest.approx(0.8413447460685429)
    assert skew_bm_cdf(0.3, 1.0, -0.7) == pytest.approx(1 - skew_bm_cdf(0.7, 1.0, 0.7))


def test_ks_decreases():
    for a in (0.5, 0.7, 0.9):
        small = ks_statistic(a, 100)
        large = ks_statistic(a, 10_000)
        assert large < small
        assert large < 0.03


def test_ks_empirical_close_to_exact():
    exact = ks_statistic(0.7, 100)
    emp = ks_statistic(0.7, 100, mode="empirical", rng=4, replicates=10**6)
    assert abs(emp - exact) < 0.005


def test_ks_validation():
    with pytest.raises(ValueError):
        ks_statistic(0.7, 10, t=0.05)
    with pytest.raises(ValueError):
        ks_statistic(0.7, 10, mode="empirical")


def test_worker_count_independence():
    a = sample_paths(0.6, 40, 5000, 3, chunk_size=1000, workers=1)
    b = sample_paths(0.6, 40, 5000, 3, chunk_size=1000, workers=3)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("sampler", ["direct", "excursion"])
def test_endpoints_match_exact_pmf(sampler):
    ends = sample_endpoints(0.3, 12, 200_000, RngContract(21, 0), sampler)
    _, pval = chisquare_vs_pmf(ends, exact_pmf(0.3, 12))
    assert pval > 1e-3


def test_samplers_agree_and_mirror():
    a = sample_endpoints(0.7, 15, 100_000, RngContract(1, 0), "direct")
    b = sample_endpoints(0.7, 15, 100_000, RngContract(1, 1), "excursion")
    m = sample_endpoints(0.3, 15, 100_000, RngContract(1, 2), "direct")
    assert chisquare_two_sample(a, b)[1] > 1e-3
    assert chisquare_two_sample(a, -m)[1] > 1e-3
    assert chisquare_vs_pmf(np.abs(a), reflected_pmf(15))[1] > 1e-3


def test_chisquare_detects_wrong_law():
    ends = sample_endpoints(0.8, 10, 100_000, 2)
    assert chisquare_vs_pmf(ends, exact_pmf(0.5, 10))[1] < 1e-6
    assert chisquare_vs_pmf(np.array([1, 3]), exact_pmf(0.5, 10))[1] == 0.0
