import math

import numpy as np
import pytest

from qwcross import (Arcsine, AsymArcsine, ContractError, Delta, DTQWLaw, Gaussian, LatticeI,
                     LatticeJ, dtqw_distribution, ftd_bessel_distribution, ftd_bessel_pmf,
                     ftd_coin, hybrid_lattice_pmf, law_cdf)
from qwcross.limits import arcsine_density, asym_arcsine_density, dtqw_density
from qwcross.walk import CoinState


def midpoint_cdf(density, lo, hi, x, cells=400_000):
    edges = np.linspace(lo, x, cells + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    return float(np.sum(density(mids)) * (x - lo) / cells)


@pytest.mark.parametrize("a", [0.3, 1 / math.sqrt(2), 0.95])
def test_dtqw_cdf_against_riemann_sum(a):
    law = DTQWLaw(a)
    for x in (-0.9 * a, -0.2 * a, 0.0, 0.5 * a):
        ref = midpoint_cdf(lambda u: dtqw_density(u, a), -a, a, x)
        # the midpoint rule misses O(sqrt(h)) of mass next to the edge singularity
        assert law.cdf(x) == pytest.approx(ref, abs=2e-3)


@pytest.mark.parametrize("a", [0.3, 1 / math.sqrt(2), 0.95])
def test_dtqw_cdf_against_weighted_quadrature(a):
    from scipy.integrate import quad

    c = math.sqrt(1 - a * a) / math.pi
    law = DTQWLaw(a)
    for x in (-0.99 * a, -0.5 * a, 0.0, 0.7 * a, 0.999 * a):
        # (u + a)^(-1/2) handled by the algebraic weight, the rest is smooth on [-a, x]
        ref, _ = quad(lambda u: c / ((1 - u * u) * math.sqrt(a - u)), -a, x,
                      weight="alg", wvar=(-0.5, 0.0), epsabs=1e-13, epsrel=1e-12)
        assert law.cdf(x) == pytest.approx(ref, abs=1e-9)


@pytest.mark.parametrize("a", [0.3, 0.6, 0.95])
def test_dtqw_cdf_closed_form(a):
    # antiderivative of the density: (1/pi) arctan(sqrt(1-a^2) x / sqrt(a^2-x^2)) + 1/2
    xs = np.linspace(-a * 0.999, a * 0.999, 41)
    ref = 0.5 + np.arctan(math.sqrt(1 - a * a) * xs / np.sqrt(a * a - xs * xs)) / math.pi
    assert np.max(np.abs(DTQWLaw(a).cdf(xs) - ref)) < 1e-9


def test_dtqw_density_edges():
    assert dtqw_density(0.6, 0.6) == math.inf
    assert dtqw_density(0.7, 0.6) == 0.0
    assert dtqw_density(0.0, 0.6) == pytest.approx(0.8 / (math.pi * 0.6))


def test_arcsine():
    law = Arcsine(2.0)
    assert law.cdf(0.0) == pytest.approx(0.5)
    assert law.cdf(1.0) == pytest.approx(0.5 + math.asin(0.5) / math.pi)
    assert law.cdf(-3) == 0.0 and law.cdf(3) == 1.0
    assert arcsine_density(0.0, 2.0) == pytest.approx(1 / (2 * math.pi))


@pytest.mark.parametrize("qL,qR", [(1, 0), (0.6, 0.8), (1 / math.sqrt(2), 1j / math.sqrt(2))])
def test_asym_arcsine(qL, qR):
    law = AsymArcsine(1.5, qL, qR)
    assert law.cdf(1.5) == 1.0 and law.cdf(-1.5) == 0.0
    xs = np.linspace(-1.49, 1.49, 30)
    assert np.all(np.diff(law.cdf(xs)) >= 0)
    mean = midpoint_cdf(lambda u: u * asym_arcsine_density(u, 1.5, qL, qR), -1.5, 1.5, 1.5)
    assert mean == pytest.approx(law.mean(), abs=2e-3)


def test_asym_arcsine_reduces_to_arcsine_for_e_l():
    xs = np.linspace(-0.99, 0.99, 11)
    assert np.allclose(AsymArcsine(1.0, 1, 0).cdf(xs), Arcsine(1.0).cdf(xs), atol=1e-10)


def test_gaussian():
    assert Gaussian(4.0).cdf(2.0) == pytest.approx(0.8413447460685429)
    assert Gaussian(0.0).cdf(-1e-9) == 0.0 and Gaussian(0.0).cdf(0.0) == 1.0


@pytest.mark.parametrize("law", [LatticeJ(0.5), LatticeJ(3.0), LatticeI(0.5), LatticeI(4.0)])
def test_lattice_laws_are_normalised(law):
    xs, p = law.table()
    assert abs(p.sum() - 1) < 1e-12
    assert np.all(p[xs % 2 == 1] == 0)
    assert law_cdf(law, xs[-1]) == pytest.approx(1.0)


def test_lattice_i_matches_lazy_limit():
    # I form at r: e^{-c} I_{x/2}(c) with c = r^2 / 2
    from scipy.special import ive

    r = 1.3
    c = r * r / 2
    for x in (0, 2, -4, 6):
        assert hybrid_lattice_pmf(x, r, "I") == pytest.approx(ive(abs(x) // 2, c), rel=1e-12)
    assert hybrid_lattice_pmf(3, r, "I") == 0.0


def test_lattice_j_values():
    from scipy.special import jv

    r = 0.8
    x = 2
    ref = jv(2, r) ** 2 + 0.5 * (jv(1, r) ** 2 + jv(3, r) ** 2)
    assert hybrid_lattice_pmf(x, r, "J") == pytest.approx(ref, rel=1e-12)
    with pytest.raises(ContractError):
        hybrid_lattice_pmf(0, r, "K")


def test_delta_law():
    assert Delta().cdf(-0.5) == 0.0 and Delta().cdf(0.0) == 1.0
    assert Delta() == Delta()


@pytest.mark.parametrize("qL,qR", [(1, 0), (0.6, 0.8), (0.6, 0.8j)])
def test_ftd_bessel_total_mass(qL, qR):
    # parity masking keeps half the sites; the full (unmasked) mass is 2 at large n
    d = ftd_bessel_distribution(1000, 5.0, qL, qR, 200)
    assert d.total == pytest.approx(1.0, abs=1e-10)
    full = ftd_bessel_pmf(np.arange(-200, 201), 5.0, qL, qR).sum()
    assert full == pytest.approx(2.0, abs=1e-10)


def test_ftd_bessel_form_tracks_walk():
    n = 4000
    st = CoinState(0.6, 0.8)
    walk = dtqw_distribution(ftd_coin(25 / n ** 2), st, n)
    approx = ftd_bessel_distribution(n, 5.0, st.qL, st.qR, n)
    assert np.max(np.abs(walk.pmf - approx.pmf)) < 1e-3


def test_validation():
    with pytest.raises(ContractError):
        DTQWLaw(1.0)
    with pytest.raises(ContractError):
        Arcsine(0)
    with pytest.raises(ContractError):
        AsymArcsine(1.0, 1, 1)
    with pytest.raises(ContractError):
        Gaussian(-1)


def test_density_point_values():
    assert dtqw_density(0.0, 1 / math.sqrt(2)) == pytest.approx(1 / math.pi)
    assert dtqw_density(-0.3, 0.6) == dtqw_density(0.3, 0.6)
    assert arcsine_density(0.0, 1.0) == pytest.approx(1 / math.pi)
    assert arcsine_density(1.0, 1.0) == math.inf and arcsine_density(1.2, 1.0) == 0.0
    s = 1 / math.sqrt(2)
    r = 1.7
    expect = 0.5 / (math.pi * math.sqrt(r * r - r * r / 4))
    assert asym_arcsine_density(r / 2, r, s, s) == pytest.approx(expect)


@pytest.mark.parametrize("qL,qR", [(1, 0), (0.6, 0.8), (0.6, -0.8j), (0.8, 0.6)])
def test_asym_arcsine_moments_by_weighted_quadrature(qL, qR):
    from scipy.integrate import quad

    r = 1.3
    kappa = 2 * (complex(qL) * complex(qR).conjugate()).real
    # the (r - x)^(-1/2) (r + x)^(-1/2) factor is the algebraic weight
    mass, _ = quad(lambda x: (1 - kappa * x / r) / math.pi, -r, r,
                   weight="alg", wvar=(-0.5, -0.5), epsabs=1e-14)
    mean, _ = quad(lambda x: x * (1 - kappa * x / r) / math.pi, -r, r,
                   weight="alg", wvar=(-0.5, -0.5), epsabs=1e-14)
    assert mass == pytest.approx(1.0, abs=1e-8)
    assert mean == pytest.approx(AsymArcsine(r, qL, qR).mean(), abs=1e-7)
    assert mean == pytest.approx(-(complex(qL) * complex(qR).conjugate()).real * r, abs=1e-7)


def test_ftd_bessel_small_time():
    assert ftd_bessel_pmf(0, 1e-8, 1, 0) == pytest.approx(1.0, abs=1e-12)


def test_mixed_starts_give_the_j_lattice_form():
    t = 2.3
    xs = np.arange(-20, 21, 2)
    mix = 0.5 * (ftd_bessel_pmf(xs, t, 1, 0) + ftd_bessel_pmf(xs, t, 0, 1))
    assert np.allclose(mix, hybrid_lattice_pmf(xs, t, "J"), atol=1e-15)


def test_lattice_i_small_parameter():
    assert hybrid_lattice_pmf(0, 1e-9, "I") == pytest.approx(1.0)


@pytest.mark.parametrize("law", [DTQWLaw(0.3), DTQWLaw(1 / math.sqrt(2)), DTQWLaw(0.95),
                                 Arcsine(1.0), AsymArcsine(1.0, 0.6, 0.8), Gaussian(0.5)])
def test_cdfs_monotone_and_reach_endpoints(law):
    lo, hi = law.support()
    lo, hi = max(lo, -6.0), min(hi, 6.0)
    xs = np.linspace(lo, hi, 1000)
    c = np.asarray(law.cdf(xs))
    assert np.all(np.diff(c) >= -1e-15)
    assert c[0] == pytest.approx(0.0, abs=1e-7) and c[-1] == pytest.approx(1.0, abs=1e-7)
    # just inside the edges the substituted quadrature must already be (almost) complete
    inner = law.cdf(np.array([lo * (1 - 1e-12), hi * (1 - 1e-12)]))
    assert inner[0] < 1e-5 and inner[1] > 1 - 1e-5
