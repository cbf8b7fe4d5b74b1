import cmath

import numpy as np
import pytest
from scipy.linalg import expm

from qwcross import (ContractError, CtqwParams, TruncationError, ctqw_amplitudes,
                     ctqw_distribution, ctqw_integrate_oracle, ctrw_distribution)


@pytest.mark.parametrize("gamma", [1, 1j, 0.6 - 0.8j, 2.5])
def test_bessel_solution_matches_matrix_exponential(gamma):
    # generator (gamma S + conj(gamma) S^-1) / 2 on a ring far larger than the light cone
    t, w = 6.0, 80
    size = 2 * w + 1
    H = np.zeros((size, size), dtype=complex)
    for i in range(size - 1):
        H[i + 1, i] = gamma
        H[i, i + 1] = np.conj(gamma)
    psi0 = np.zeros(size, dtype=complex)
    psi0[w] = 1
    psi = expm(0.5j * t * H) @ psi0
    amps = ctqw_amplitudes(CtqwParams(gamma, t), halfwidth=w)
    assert np.max(np.abs(amps - psi)) < 1e-12


@pytest.mark.parametrize("gamma", [1, 1j])
def test_rk4_oracle_at_t20(gamma):
    p = CtqwParams(gamma, 20.0)
    dist = ctqw_distribution(p)
    w = -dist.offset
    psi = ctqw_integrate_oracle(p, halfwidth=w)
    assert np.max(np.abs(np.abs(psi) ** 2 - dist.pmf)) <= 1e-8


@pytest.mark.parametrize("gamma,t", [(1, 20.0), (1j, 20.0), (0.3 + 0.4j, 50.0), (2, 0.5)])
def test_second_moment(gamma, t):
    d = ctqw_distribution(CtqwParams(gamma, t))
    second = np.dot(d.support.astype(float) ** 2, d.pmf)
    assert second == pytest.approx(abs(gamma) ** 2 * t * t / 2, rel=1e-8)
    assert abs(d.total - 1) < 1e-12


def test_distribution_depends_on_gamma_only_through_modulus():
    a = ctqw_distribution(CtqwParams(1, 13.0)).pmf
    b = ctqw_distribution(CtqwParams(cmath.exp(0.7j), 13.0)).pmf
    assert np.max(np.abs(a - b)) < 1e-15


def test_zero_time_is_a_point_mass():
    d = ctqw_distribution(CtqwParams(1, 0.0))
    assert d.at(0) == 1.0 and d.total == 1.0


def test_narrow_window_is_rejected():
    with pytest.raises(TruncationError):
        ctqw_distribution(CtqwParams(1, 50.0), halfwidth=20)


def test_params_validation():
    with pytest.raises(ContractError):
        CtqwParams(0, 1.0)
    with pytest.raises(ContractError):
        CtqwParams(1, -1.0)


def test_oracle_rejects_large_step():
    with pytest.raises(ContractError):
        ctqw_integrate_oracle(CtqwParams(1, 1.0), dt=0.1)


@pytest.mark.parametrize("t", [0.0, 0.5, 7.0, 300.0, 2000.0])
def test_ctrw_mass_and_variance(t):
    d = ctrw_distribution(t)
    assert abs(d.total - 1) < 1e-12
    assert d.variance() == pytest.approx(t, rel=1e-10, abs=1e-14)


def test_ctrw_matches_poisson_difference():
    # X = N+ - N- with independent Poisson(t/2) counts
    from scipy.stats import skellam

    t = 4.0
    d = ctrw_distribution(t)
    assert np.allclose(d.pmf, skellam.pmf(d.support, t / 2, t / 2), atol=1e-15)


@pytest.mark.parametrize("t", [5.0, 100.0])
def test_second_moment_other_times(t):
    d = ctqw_distribution(CtqwParams(1, t))
    assert np.dot(d.support.astype(float) ** 2, d.pmf) == pytest.approx(t * t / 2, rel=1e-8)


def test_ballistic_scaling_approaches_arcsine():
    from qwcross import Arcsine, ks_distance

    ks = [ks_distance(ctqw_distribution(CtqwParams(1, t)), t, 0.0, Arcsine(1.0))
          for t in (20.0, 200.0)]
    assert ks[1] < ks[0]


def test_ctrw_is_exactly_symmetric():
    p = ctrw_distribution(37.5).pmf
    assert np.array_equal(p, p[::-1])
