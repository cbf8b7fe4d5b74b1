import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammaln

from qwcross import (CoinState, ContractError, Distribution, PhasePoint, PrecisionError,
                     Schedule, compose_pm, continuous_power_schedule, convolve, convolve_power,
                     ctqw_pm_distribution, dtqw_distribution, dtqw_pm_distribution,
                     ftd_ppm_distribution, ftd_rate, geometric_schedule, hadamard,
                     lazy_rw_distribution, power_schedule, sigma_squared, symmetric_state,
                     theta, validate_assumption)
from qwcross.acceptance import two_step_ftd_segment
from qwcross.measurement import ftd_segment_distribution, random_coin_states

COIN = {-1: 0.5, 1: 0.5}


def sup(a, b):
    lo = min(a.offset, b.offset)
    hi = max(a.offset + len(a), b.offset + len(b))
    return np.max(np.abs(a.on(lo, hi) - b.on(lo, hi)))


def test_theta_examples():
    assert theta(Schedule((3, 4), 7)) == 5
    assert theta(Schedule((9,), 9)) == 9
    assert theta(Schedule((5,) * 16, 80)) == pytest.approx(20)


def test_power_schedule_examples():
    s = power_schedule(1000, 0.0)
    assert s.durations[0] == 1 and s.M == 1000
    s = power_schedule(1000, 1.0)
    assert s.durations == (1000,)
    s = power_schedule(1024, 0.5, even_spans=True)
    assert s.durations[0] == 46 and s.M == 22
    assert s.discarded == 1024 - 46 * 22
    assert power_schedule(100, 0.0, even_spans=True).durations[0] == 2


def test_schedule_validation():
    with pytest.raises(ContractError):
        Schedule((3, 4), 6)
    with pytest.raises(ContractError):
        Schedule((0, 4), 6)


def test_geometric_schedule():
    s = geometric_schedule(1000, 0.999, seed=3)
    assert sum(d == 1 for d in s.durations) >= 0.99 * s.M
    assert geometric_schedule(5000, 0.05, 11) == geometric_schedule(5000, 0.05, 11)
    big = geometric_schedule(100_000, 0.01, 7)
    assert np.mean(big.durations) == pytest.approx(100, rel=0.05)
    assert sum(big.durations) <= 100_000


def test_validate_assumption_examples():
    grid = [100, 1000, 10000]
    assert validate_assumption(lambda n: power_schedule(n, 0.5), grid).ok
    assert validate_assumption(lambda n: Schedule((2,) * (n // 2), n), grid).failures == [2]
    assert validate_assumption(lambda n: Schedule((n,), n), grid).failures == [3]


def test_convolve_examples():
    q = Distribution.from_dict(COIN)
    assert sup(convolve(Distribution.delta(0), q), q) == 0
    two = convolve(q, q)
    assert [two.at(x) for x in (-2, -1, 0, 1, 2)] == [0.25, 0, 0.5, 0, 0.25]


def test_naive_and_fft_agree():
    rng = np.random.default_rng(0)
    for _ in range(5):
        p = rng.random(1000)
        q = rng.random(1000)
        a = Distribution(-7, p / p.sum())
        b = Distribution(3, q / q.sum())
        assert sup(convolve(a, b, "naive"), convolve(a, b, "fft")) < 1e-12


def test_convolve_against_numpy_on_parity_lattices():
    a = dtqw_distribution(hadamard(), CoinState.left(), 31)
    b = dtqw_distribution(hadamard(), CoinState(0.6, 0.8), 20)
    got = convolve(a, b)
    ref = Distribution(a.offset + b.offset, np.convolve(a.pmf, b.pmf))
    assert sup(got, ref) < 1e-15
    assert got.stride() == 2 or got.trimmed().stride() == 2


@pytest.mark.parametrize("M", [0, 1, 2, 7, 64, 1000, 5001])
def test_convolve_power_binomial(M):
    d = convolve_power(Distribution.from_dict(COIN), M)
    k = np.arange(M + 1)
    binom = np.exp(gammaln(M + 1) - gammaln(k + 1) - gammaln(M - k + 1) - M * math.log(2))
    assert np.max(np.abs(d.on(-M, M)[::2] - binom)) <= 1e-12
    if M == 0:
        assert d.offset == 0 and d.pmf.tolist() == [1.0]


def test_convolve_power_one_is_identity():
    p = Distribution.from_dict({-1: 0.2, 0: 0.3, 3: 0.5})
    assert sup(convolve_power(p, 1), p) == 0


def test_unknown_method_rejected():
    with pytest.raises(ContractError):
        convolve(Distribution.delta(0), Distribution.delta(0), "magic")


def test_negative_fft_output_is_an_error(monkeypatch):
    import qwcross.measurement as m

    def bad(p, q):
        out = np.convolve(p, q)
        out[0] -= 1e-9
        return out

    monkeypatch.setattr(m, "_fft_convolve", bad)
    p = Distribution(0, np.full(3000, 1 / 3000))
    with pytest.raises(PrecisionError):
        convolve(p, p, "fft")


def test_fft_drift_is_detected(monkeypatch):
    import qwcross.measurement as m

    monkeypatch.setattr(m, "_fft_convolve", lambda p, q: np.convolve(p, q) * (1 + 1e-6))
    p = Distribution(0, np.full(3000, 1 / 3000))
    with pytest.raises(PrecisionError):
        convolve(p, p, "fft")


def test_compose_examples():
    assert compose_pm([Distribution.delta(0)] * 4).pmf.tolist() == [1.0]
    segs = [dtqw_distribution(hadamard(), CoinState(0.6, 0.8), d) for d in (3, 5, 8, 13)]
    out = compose_pm(segs)
    assert out.mean() == pytest.approx(sum(s.mean() for s in segs), abs=1e-10)
    assert out.variance() == pytest.approx(sum(s.variance() for s in segs), rel=1e-9)


def test_two_unit_hadamard_segments_by_hand():
    # measure after each step; every segment from e_L moves -1 or +1 w.p. |a|^2 = |c|^2 = 1/2
    d = dtqw_pm_distribution(hadamard(), Schedule((1, 1), 2), CoinState.left())
    assert [d.at(x) for x in (-2, 0, 2)] == pytest.approx([0.25, 0.5, 0.25], abs=1e-15)


def test_per_segment_states():
    sched = Schedule((4, 6, 4), 14)
    states = random_coin_states(3, seed=5)
    d = dtqw_pm_distribution(hadamard(), sched, states)
    ref = compose_pm([dtqw_distribution(hadamard(), s, k) for s, k in zip(states, (4, 6, 4))])
    assert sup(d, ref) < 1e-15
    assert random_coin_states(3, 5) == states
    with pytest.raises(ContractError):
        dtqw_pm_distribution(hadamard(), sched, states[:2])


def test_measured_hadamard_variance_ratio():
    coin = hadamard()
    state = symmetric_state(coin)
    ratios = []
    for n in (1000, 10000):
        d = math.floor(n ** 0.6)
        sched = Schedule((d,) * (n // d), n)
        ratios.append(dtqw_pm_distribution(coin, sched, state).variance() / theta(sched) ** 2)
    target = sigma_squared(1 / math.sqrt(2))
    assert abs(ratios[1] / target - 1) < 0.05
    assert abs(ratios[1] - target) < abs(ratios[0] - target)


def test_measured_ctqw_variance_constant_is_stable():
    vals = []
    for t in (1e3, 1e4):
        sched = continuous_power_schedule(t, 0.5)
        vals.append(ctqw_pm_distribution(1, sched).variance() / theta(sched) ** 2)
    assert vals[1] == pytest.approx(vals[0], rel=0.02)


def test_ftd_segment_by_hand():
    for r_n in (0.5, 0.1, 1e-4):
        seg = ftd_segment_distribution(r_n, 2)
        hand = two_step_ftd_segment(r_n)
        for x in (-2, 0, 2):
            assert seg.at(x) == pytest.approx(hand[x], abs=1e-15)
        assert hand[2] == pytest.approx(r_n / 2) and hand[-2] == pytest.approx(r_n / 2)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([0.0, 0.3, 0.5, 1.0]), st.integers(4, 200))
def test_two_step_measured_ftd_is_lazy(alpha, half):
    n = 2 * half
    point = PhasePoint(alpha, 0.0, 0.5)
    got = ftd_ppm_distribution(point, n)
    lazy = lazy_rw_distribution(ftd_rate(point, n), n // 2).scaled_support(2)
    assert sup(got, lazy) <= 1e-12


def test_single_segment_is_plain_ftd_mixture():
    point = PhasePoint(0.5, 1.0, 0.5)
    n = 300
    got = ftd_ppm_distribution(point, n)
    assert got.meta["M"] == 1 and got.meta["d"] == n
    ref = ftd_segment_distribution(ftd_rate(point, n), n)
    assert sup(got, ref) < 1e-15
    assert abs(got.total - 1) < 1e-12 and got.trimmed().stride() == 2


def test_ftd_ppm_validation():
    with pytest.raises(ContractError):
        ftd_ppm_distribution(PhasePoint(0.5, 0.5, 0.5), 101)
    with pytest.raises(ContractError):
        PhasePoint(1.2, 0.5, 0.5)
