import numpy as np
import pytest

from nmqj.errors import NegativeTime
from nmqj.reservoir import ConstantRate, LorentzianChannelRate, LorentzianReservoir


@pytest.fixture
def reservoir():
    return LorentzianReservoir(coupling=5.0, width=1.0, cavity_freq=1000.0)


@pytest.fixture
def rate(reservoir):
    return LorentzianChannelRate(detuning=5.0, reservoir=reservoir)


def test_spectral_density_peak(reservoir):
    assert reservoir.spectral_density(1000.0) == pytest.approx(10.0 / np.pi, rel=1e-12)


def test_spectral_density_half_height(reservoir):
    half = 5.0 / np.pi
    assert reservoir.spectral_density(1000.5) == pytest.approx(half, rel=1e-12)
    assert reservoir.spectral_density(999.5) == pytest.approx(half, rel=1e-12)


def test_spectral_density_tails_vanish(reservoir):
    assert reservoir.spectral_density(1e7) < 1e-11
    assert reservoir.spectral_density(-1e7) < 1e-11


def test_reservoir_validation():
    with pytest.raises(ValueError):
        LorentzianReservoir(coupling=-1.0)
    with pytest.raises(ValueError):
        LorentzianReservoir(coupling=1.0, width=0.0)
    with pytest.raises(ValueError):
        LorentzianReservoir(coupling=1.0, cavity_freq=2.0)


def test_decay_rate_zero_at_zero(rate):
    assert rate.decay_rate(0.0) == 0.0


def test_decay_rate_markov_limit(rate):
    # golden-rule value alpha^2 * width / (detuning^2 + width^2/4)
    assert rate.markov_decay_rate() == pytest.approx(5.0 / 25.25, rel=1e-12)
    assert float(rate.decay_rate(60.0)) == pytest.approx(rate.markov_decay_rate(), abs=1e-6)
    golden = 2.0 * np.pi * rate.reservoir.spectral_density(rate.bohr_freq)
    assert rate.markov_decay_rate() == pytest.approx(golden, rel=1e-9)


def test_decay_rate_goes_negative(rate):
    ts = np.linspace(0.0, 5.0, 501)
    assert np.min(rate.decay_rate(ts)) < 0.0


def test_decay_rate_initial_growth(rate):
    # slope at 0+ equals twice the full spectral weight
    h = 1e-7
    assert float(rate.decay_rate(h)) / h == pytest.approx(2.0 * 5.0, rel=1e-5)


def test_decay_rate_even_in_detuning(reservoir):
    plus = LorentzianChannelRate(detuning=3.0, reservoir=reservoir)
    minus = LorentzianChannelRate(detuning=-3.0, reservoir=reservoir)
    ts = np.linspace(0.0, 8.0, 50)
    assert np.allclose(plus.decay_rate(ts), minus.decay_rate(ts), atol=1e-14)


def test_lamb_shift_zero_at_zero(rate):
    assert rate.lamb_shift_rate(0.0) == 0.0


def test_lamb_shift_markov_limit(rate):
    assert rate.markov_lamb_shift_rate() == pytest.approx(25.0 / 25.25, rel=1e-12)
    assert float(rate.lamb_shift_rate(60.0)) == pytest.approx(
        rate.markov_lamb_shift_rate(), abs=1e-6
    )


def test_lamb_shift_vanishes_on_resonance(reservoir):
    resonant = LorentzianChannelRate(detuning=0.0, reservoir=reservoir)
    ts = np.linspace(0.0, 10.0, 101)
    assert np.max(np.abs(resonant.lamb_shift_rate(ts))) < 1e-14


def test_lamb_shift_odd_in_detuning(reservoir):
    plus = LorentzianChannelRate(detuning=3.0, reservoir=reservoir)
    minus = LorentzianChannelRate(detuning=-3.0, reservoir=reservoir)
    ts = np.linspace(0.0, 8.0, 50)
    assert np.allclose(plus.lamb_shift_rate(ts), -minus.lamb_shift_rate(ts), atol=1e-14)


def test_negative_time_rejected(rate):
    for fn in (rate.decay_rate, rate.lamb_shift_rate, rate.accumulated_decay,
               rate.accumulated_lamb_shift, rate.decay_rate_quadrature):
        with pytest.raises(NegativeTime):
            fn(-0.1)


@pytest.mark.parametrize("detuning", [-3.0, 5.0])
@pytest.mark.parametrize("coupling", [2.0, 5.0])
def test_closed_forms_match_quadrature(coupling, detuning):
    rate = LorentzianChannelRate(
        detuning=detuning, reservoir=LorentzianReservoir(coupling=coupling)
    )
    for t in (0.25, 0.9425, 2.0, 6.0, 10.0):
        qd = rate.decay_rate_quadrature(t)
        assert abs(float(rate.decay_rate(t)) - qd) / abs(qd) < 1e-4
        ql = rate.lamb_shift_rate_quadrature(t)
        assert abs(float(rate.lamb_shift_rate(t)) - ql) / abs(ql) < 1e-4


@pytest.mark.parametrize("detuning", [-3.0, 5.0])
def test_closed_forms_match_nested_quadrature(detuning):
    # literal integration order of the defining formula: nu first, then s
    rate = LorentzianChannelRate(
        detuning=detuning, reservoir=LorentzianReservoir(coupling=2.0)
    )
    for t in (0.5, 1.5):
        qd = rate.decay_rate_quadrature_nested(t)
        assert abs(float(rate.decay_rate(t)) - qd) / abs(qd) < 1e-4
        ql = rate.lamb_shift_rate_quadrature_nested(t)
        assert abs(float(rate.lamb_shift_rate(t)) - ql) / abs(ql) < 1e-4


def test_accumulated_decay_properties(rate):
    assert rate.accumulated_decay(0.0) == 0.0
    assert rate.accumulated_lamb_shift(0.0) == 0.0
    # antiderivative agrees with adaptive quadrature of the rate
    for t in (0.7, 2.3, 6.0):
        assert float(rate.accumulated_decay(t)) == pytest.approx(
            rate.accumulated_decay_quadrature(t), abs=1e-7
        )
        assert float(rate.accumulated_lamb_shift(t)) == pytest.approx(
            rate.accumulated_lamb_shift_quadrature(t), abs=1e-7
        )


def test_accumulated_decay_late_slope(rate):
    # for large t the accumulated decay grows linearly at the Markov rate
    slope = (float(rate.accumulated_decay(30.5)) - float(rate.accumulated_decay(29.5)))
    assert slope == pytest.approx(rate.markov_decay_rate(), abs=1e-6)


def test_accumulated_decay_monotone_with_rate_sign(rate):
    # D decreases exactly where the rate is negative
    ts = np.linspace(0.05, 6.0, 240)
    deltas = rate.decay_rate(ts)
    d_acc = rate.accumulated_decay(ts)
    for k in range(len(ts) - 1):
        if abs(deltas[k]) > 0.05 and np.sign(deltas[k]) == np.sign(deltas[k + 1]):
            assert np.sign(d_acc[k + 1] - d_acc[k]) == np.sign(deltas[k])


def test_derivative_consistency(rate):
    # accumulated_decay' = decay_rate, accumulated_lamb_shift' = lamb_shift_rate
    h = 1e-6
    for t in (0.4, 1.1, 3.3):
        fd = (float(rate.accumulated_decay(t + h)) - float(rate.accumulated_decay(t - h))) / (2 * h)
        assert fd == pytest.approx(float(rate.decay_rate(t)), rel=1e-7, abs=1e-9)
        fl = (float(rate.accumulated_lamb_shift(t + h)) - float(rate.accumulated_lamb_shift(t - h))) / (2 * h)
        assert fl == pytest.approx(float(rate.lamb_shift_rate(t)), rel=1e-7, abs=1e-9)


def test_constant_rate():
    r = ConstantRate(decay=0.8, lamb_shift=0.1)
    assert r.decay_rate(3.0) == 0.8
    assert r.lamb_shift_rate(3.0) == 0.1
    assert r.accumulated_decay(2.0) == pytest.approx(1.6)
    assert r.accumulated_lamb_shift(2.0) == pytest.approx(0.2)
    assert r.markov_decay_rate() == 0.8
    ts = np.array([0.0, 1.0, 2.0])
    assert np.array_equal(r.decay_rate(ts), np.array([0.8, 0.8, 0.8]))
    with pytest.raises(NegativeTime):
        r.decay_rate(-1.0)
