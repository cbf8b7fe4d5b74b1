import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwcross import (ContractError, ResourceError, correlated_asymptotic_distribution,
                     correlated_asymptotic_pmf, correlated_rw_distribution,
                     lazy_asymptotic_distribution, lazy_asymptotic_pmf, lazy_rw_closed_form,
                     lazy_rw_distribution)


def sup(a, b):
    lo = min(a.offset, b.offset)
    hi = max(a.offset + len(a), b.offset + len(b))
    return np.max(np.abs(a.on(lo, hi) - b.on(lo, hi)))


def test_lazy_two_steps_by_hand():
    r = 0.4
    d = lazy_rw_distribution(r, 2)
    # moves: -1 w.p. r/2, 0 w.p. 1-r, +1 w.p. r/2
    assert d.at(2) == pytest.approx((r / 2) ** 2)
    assert d.at(1) == pytest.approx(2 * (r / 2) * (1 - r))
    assert d.at(0) == pytest.approx((1 - r) ** 2 + 2 * (r / 2) ** 2)


@pytest.mark.parametrize("n", [0, 1, 2, 13, 100, 200])
@pytest.mark.parametrize("r", [0.01, 0.3, 0.77, 1.0])
def test_lazy_dp_matches_closed_form(n, r):
    assert sup(lazy_rw_distribution(r, n), lazy_rw_closed_form(r, n)) <= 1e-12


def test_lazy_r1_is_simple_walk():
    d = lazy_rw_distribution(1.0, 10)
    from scipy.stats import binom

    k = np.arange(11)
    assert np.allclose(d.on(-10, 10)[::2], binom.pmf(k, 10, 0.5), atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.001, 1.0), st.integers(0, 300))
def test_lazy_moments(r, n):
    d = lazy_rw_distribution(r, n)
    assert abs(d.total - 1) < 1e-12
    assert d.variance() == pytest.approx(n * r, rel=1e-9, abs=1e-12)


def test_lazy_bessel_limit_improves():
    errs = [sup(lazy_rw_distribution(1 / n, n), lazy_asymptotic_distribution(1.0, 60))
            for n in (100, 1000, 10000)]
    assert errs[0] > errs[1] > errs[2]
    assert lazy_asymptotic_pmf(0, 0.0) == 1.0


def test_lazy_bounds():
    with pytest.raises(ResourceError):
        lazy_rw_distribution(0.5, 100_001)
    with pytest.raises(ContractError):
        lazy_rw_distribution(0.0, 10)
    with pytest.raises(ContractError):
        lazy_rw_distribution(1.5, 10)


def test_correlated_first_steps_by_hand():
    r = 0.2
    # start weights on the directions: the first step already moves
    d1 = correlated_rw_distribution(r, 1, 1.0, 0.0)
    # L from L with prob r, R from L with prob 1 - r
    assert d1.at(-1) == pytest.approx(r) and d1.at(1) == pytest.approx(1 - r)
    d2 = correlated_rw_distribution(r, 2, 1.0, 0.0)
    assert d2.at(-2) == pytest.approx(r * r)
    assert d2.at(0) == pytest.approx(r * (1 - r) + (1 - r) * (1 - r))
    assert d2.at(2) == pytest.approx((1 - r) * r)


def test_correlated_half_is_simple_walk():
    from scipy.stats import binom

    d = correlated_rw_distribution(0.5, 12, 0.3, 0.7)
    assert np.allclose(d.on(-12, 12)[::2], binom.pmf(np.arange(13), 12, 0.5), atol=1e-15)


@pytest.mark.parametrize("pL,pR", [(1.0, 0.0), (0.5, 0.5), (0.2, 0.8)])
def test_correlated_mass_and_parity(pL, pR):
    d = correlated_rw_distribution(0.1, 501, pL, pR)
    assert abs(d.total - 1) < 1e-12
    assert d.stride() == 2


@pytest.mark.parametrize("pL,pR", [(1.0, 0.0), (0.5, 0.5)])
def test_correlated_bessel_form_improves(pL, pR):
    errs = [sup(correlated_rw_distribution(1 / n, n, pL, pR),
                correlated_asymptotic_distribution(n, 1.0, pL, pR, 80)) for n in (200, 2000)]
    assert errs[1] < errs[0] / 5


def test_correlated_vector_and_scalar_forms_agree():
    d = correlated_asymptotic_distribution(10, 1.3, 0.25, 0.75, 12)
    for x in range(-12, 13):
        assert d.at(x) == pytest.approx(correlated_asymptotic_pmf(x, 10, 1.3, 0.25, 0.75),
                                        abs=1e-14)
    assert d.at(1) == 0.0


def test_correlated_validation():
    with pytest.raises(ContractError):
        correlated_rw_distribution(0.3, 5, 0.5, 0.6)
    with pytest.raises(ContractError):
        correlated_rw_distribution(1.0, 5, 0.5, 0.5)
    assert math.isclose(correlated_rw_distribution(0.3, 0, 0.5, 0.5).at(0), 1.0)
