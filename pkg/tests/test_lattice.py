import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewwalk.bruteforce import brute_pmf
from skewwalk.lattice import (
    LatticePmf,
    ResourceLimitError,
    SkewParam,
    conditional_increment_moments,
    delta,
    exact_pmf,
    factorized_pmf,
    reflected_pmf,
    step,
)

alphas = st.floats(min_value=0.01, max_value=0.99)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.5, float("nan")])
def test_skew_param_rejects_closed_endpoints(bad):
    with pytest.raises(ValueError, match="alpha must lie in"):
        SkewParam(bad)


def test_pmf_invariants_enforced():
    with pytest.raises(ValueError):
        LatticePmf(0, [0.5, 0.4], 1)  # mass 0.9
    with pytest.raises(ValueError):
        LatticePmf(-1, [0.5, 0.5, 0.0], 1)  # mass at 0 after one step
    with pytest.raises(ValueError):
        LatticePmf(-1, [1.2, -0.2, 0.0], 1)


def test_step_from_origin():
    assert step(delta(0), 0.7).to_dict() == pytest.approx({-1: 0.3, 1: 0.7})
    assert step(delta(0), 0.5).to_dict() == {-1: 0.5, 1: 0.5}


def test_step_off_origin_is_fair():
    out = step(delta(5), 0.9)
    assert out.to_dict() == {4: 0.5, 6: 0.5}
    assert out.step_index == 6


def test_exact_pmf_small_cases():
    assert exact_pmf(0.3, 0).to_dict() == {0: 1.0}
    assert exact_pmf(0.7, 2).to_dict() == pytest.approx({-2: 0.15, 0: 0.5, 2: 0.35}, abs=1e-15)
    for a in (0.1, 0.6, 0.95):
        assert exact_pmf(a, 2)[0] == pytest.approx(0.5, abs=1e-15)


def test_exact_pmf_matches_enumeration_small_k():
    for k in range(9):
        ex = exact_pmf(0.37, k)
        bf = brute_pmf(0.37, k)
        for m, prob in bf.items():
            assert ex[m] == pytest.approx(prob, abs=1e-14)


def test_reflected_pmf():
    assert reflected_pmf(0).to_dict() == {0: 1.0}
    assert reflected_pmf(1).to_dict() == {1: 1.0}
    assert reflected_pmf(2).to_dict() == pytest.approx({0: 0.5, 2: 0.5})


def test_factorized_examples():
    assert factorized_pmf(0.7, 2).max_abs_diff(exact_pmf(0.7, 2)) < 1e-15
    assert factorized_pmf(0.25, 4)[4] == pytest.approx(0.03125, abs=1e-15)
    ssrw = reflected_pmf(7)
    half = factorized_pmf(0.5, 7)
    for m in range(1, 8):
        assert half[m] == pytest.approx(ssrw[m] / 2) and half[-m] == pytest.approx(ssrw[m] / 2)


def test_resource_limit(monkeypatch):
    import skewwalk.lattice as lat

    monkeypatch.setattr(lat, "MAX_STEPS", 10)
    with pytest.raises(ResourceLimitError):
        lat.exact_pmf(0.5, 11)


def test_conditional_moments():
    cm = conditional_increment_moments(exact_pmf(0.7, 6), 0.7)
    assert cm.mean_at_zero == pytest.approx(0.4, abs=1e-15)
    assert cm.mean_off_zero == 0.0
    assert cm.second_moment == 1.0
    assert conditional_increment_moments(delta(0), 0.5).mean_at_zero == 0.0


@settings(max_examples=40, deadline=None)
@given(alphas, st.integers(0, 120))
def test_mass_parity_and_support(a, k):
    pmf = exact_pmf(a, k)
    assert abs(pmf.weights.sum() - 1) <= 1e-12
    m = pmf.points
    assert np.all(pmf.weights[(m - k) % 2 != 0] == 0)
    assert pmf.min_support == -k and pmf.max_support == k


@settings(max_examples=40, deadline=None)
@given(alphas, st.integers(0, 150))
def test_mirror_and_folding(a, k):
    pmf = exact_pmf(a, k)
    mirror = exact_pmf(1 - a, k)
    assert np.max(np.abs(pmf.weights - mirror.weights[::-1])) <= 1e-12
    refl = reflected_pmf(k)
    for m in range(1, k + 1):
        assert abs(pmf[m] + pmf[-m] - refl[m]) <= 1e-12
    assert abs(pmf[0] - refl[0]) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(alphas, st.integers(0, 200))
def test_factorization_property(a, k):
    assert exact_pmf(a, k).max_abs_diff(factorized_pmf(a, k)) <= 1e-12
