import numpy as np
import pytest

from nmqj import linalg
from nmqj.errors import UnsupportedModel
from nmqj.models import (
    build_jaynes_cummings,
    build_ladder,
    build_lambda,
    build_vee,
    master_rhs,
    with_constant_rates,
)
from nmqj.oracle import (
    AnalyticSolution,
    analytic_density,
    analytic_series,
    integrate_master_equation,
    positivity_scan,
    rate_equation_sign_check,
)
from nmqj.series import TrajectorySeries, compare_series

PAPER_MODELS = {
    "jc": build_jaynes_cummings(),
    "lambda": build_lambda(),
    "vee": build_vee(),
    "ladder": build_ladder("mixed_start"),
}


@pytest.mark.parametrize("name", sorted(PAPER_MODELS))
def test_analytic_density_at_zero(name):
    m = PAPER_MODELS[name]
    assert np.allclose(
        analytic_density(m, 0.0), linalg.outer(m.initial_state), atol=1e-14
    )


def test_jc_excited_population_formula():
    m = build_jaynes_cummings()
    for t in (0.5, 1.7, 4.0):
        rho = analytic_density(m, t)
        d1 = float(m.channels[0].rate.accumulated_decay(t))
        assert rho[0, 0].real == pytest.approx(np.exp(-d1) * 9.0 / 13.0, rel=1e-12)
        assert abs(rho[0, 1]) == pytest.approx(
            np.exp(-d1 / 2.0) * abs(m.initial_state[0] * m.initial_state[1]), rel=1e-12
        )


@pytest.mark.parametrize("name", sorted(PAPER_MODELS))
def test_oracles_agree_elementwise(name):
    m = PAPER_MODELS[name]
    times = np.round(np.arange(0, 61) * 0.1, 12)
    ana = analytic_series(m, times)
    rk4 = integrate_master_equation(m, 6.0, dt_int=1e-3, record_times=times)
    rep = compare_series(ana, rk4, 1e-6)
    assert rep.passed, rep.per_element
    # with the shift disabled both routes carry identical phases too
    assert np.max(np.abs(ana.rho - rk4.rho)) < 1e-6


def test_oracles_agree_with_lamb_shift_enabled():
    m = build_vee(lamb_shift_enabled=True)
    times = np.round(np.arange(0, 31) * 0.1, 12)
    ana = analytic_series(m, times)
    rk4 = integrate_master_equation(m, 3.0, dt_int=1e-3, record_times=times)
    assert np.max(np.abs(ana.rho - rk4.rho)) < 1e-6


@pytest.mark.parametrize("name", sorted(PAPER_MODELS))
def test_oracle_traces(name):
    m = PAPER_MODELS[name]
    times = np.round(np.arange(0, 31) * 0.2, 12)
    for series in (
        analytic_series(m, times),
        integrate_master_equation(m, 6.0, dt_int=1e-3, record_times=times),
    ):
        traces = np.trace(series.rho, axis1=1, axis2=2)
        assert np.max(np.abs(traces - 1.0)) < 1e-10


@pytest.mark.parametrize("name", sorted(PAPER_MODELS))
def test_analytic_solution_satisfies_master_equation(name):
    # centered finite difference of the closed form reproduces the rhs, O(h^2)
    m = PAPER_MODELS[name]
    for t in (0.45, 1.3):
        errs = []
        for h in (2e-4, 1e-4):
            fd = (analytic_density(m, t + h) - analytic_density(m, t - h)) / (2 * h)
            errs.append(np.max(np.abs(fd - master_rhs(m, analytic_density(m, t), t))))
        assert errs[0] < 1e-6
        assert errs[0] / errs[1] == pytest.approx(4.0, abs=0.8)


def test_analytic_solution_wrapper():
    m = build_jaynes_cummings()
    sol = AnalyticSolution(m)
    assert np.allclose(sol(1.0), analytic_density(m, 1.0), atol=1e-15)
    with pytest.raises(UnsupportedModel):
        AnalyticSolution(
            build_jaynes_cummings().__class__(
                name="custom", dim=2, basis_labels=("x", "y"),
                channels=m.channels, initial_state=m.initial_state,
            )
        )


def test_rk4_constant_zero_rates_is_identity():
    m = with_constant_rates(build_lambda(), [0.0, 0.0])
    times = np.array([0.0, 1.0, 2.0])
    series = integrate_master_equation(m, 2.0, dt_int=1e-3, record_times=times)
    for rho in series.rho:
        assert np.allclose(rho, series.rho[0], atol=1e-13)


def test_rk4_constant_rate_exponential():
    m = with_constant_rates(build_jaynes_cummings(), [0.7])
    times = np.round(np.arange(0, 21) * 0.1, 12)
    series = integrate_master_equation(m, 2.0, dt_int=1e-3, record_times=times)
    expected = np.exp(-0.7 * times) * 9.0 / 13.0
    assert np.max(np.abs(series.rho[:, 0, 0].real - expected)) < 1e-9


def test_positivity_scan_jc_none():
    m = build_jaynes_cummings()
    times = np.round(np.arange(0, 61) * 0.1, 12)
    assert positivity_scan(analytic_series(m, times)) is None


def test_positivity_scan_pure_state_series():
    m = build_jaynes_cummings()
    from nmqj.engine import deterministic_step

    v = m.initial_state.copy()
    rhos, ts = [linalg.outer(v)], [0.0]
    for k in range(100):
        v = deterministic_step(v, k * 0.01, m, 0.01)
        rhos.append(linalg.outer(v))
        ts.append((k + 1) * 0.01)
    series = TrajectorySeries(times=np.array(ts), rho=np.array(rhos),
                              rates=None, counts=None)
    assert positivity_scan(series) is None


def test_positivity_scan_ladder_excited():
    m = build_ladder("excited_start")
    times = np.round(np.arange(0, 301) * 0.01, 12)
    rk4 = integrate_master_equation(m, 3.0, dt_int=1e-3, record_times=times)
    t_loss = positivity_scan(rk4, tol=1e-6)
    assert t_loss is not None
    assert 1.0 <= t_loss <= 1.05  # grid value for the known loss near t ~ 1


def test_sign_check_analytic_jc():
    m = build_jaynes_cummings()
    times = np.round(np.arange(0, 61) * 0.1, 12)
    assert rate_equation_sign_check(m, analytic_series(m, times))


def test_sign_check_constant_rate():
    m = with_constant_rates(build_jaynes_cummings(), [0.8])
    times = np.round(np.arange(0, 31) * 0.1, 12)
    series = integrate_master_equation(m, 3.0, dt_int=1e-3, record_times=times)
    assert rate_equation_sign_check(m, series)


def test_sign_check_rejects_conjugated_jump_dynamics():
    # negative control: treating a negative rate as a positive rate for the
    # raising operator decoheres instead of recohering and must be flagged
    m = build_jaynes_cummings()
    rate = m.channels[0].rate
    dt = 1e-3
    n = 6000
    rho = linalg.outer(m.initial_state)
    c_low = m.channels[0].jump_op
    c_raise = c_low.conj().T

    def rhs(t, rho):
        d = float(rate.decay_rate(t))
        c = c_low if d >= 0 else c_raise
        cdc = c.conj().T @ c
        return abs(d) * (c @ rho @ c.conj().T - 0.5 * (cdc @ rho + rho @ cdc))

    times, rhos = [0.0], [rho]
    for k in range(n):
        t = k * dt
        k1 = rhs(t, rho)
        k2 = rhs(t + dt / 2, rho + dt / 2 * k1)
        k3 = rhs(t + dt / 2, rho + dt / 2 * k2)
        k4 = rhs(t + dt, rho + dt * k3)
        rho = rho + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if (k + 1) % 100 == 0:
            times.append((k + 1) * dt)
            rhos.append(rho)
    wrong = TrajectorySeries(times=np.array(times), rho=np.array(rhos),
                             rates=None, counts=None)
    assert not rate_equation_sign_check(m, wrong)


def test_sign_check_requires_two_level_model():
    m = build_lambda()
    times = np.array([0.0, 0.1])
    with pytest.raises(UnsupportedModel):
        rate_equation_sign_check(m, analytic_series(m, times))


def test_unsupported_model_analytic():
    import dataclasses

    m = dataclasses.replace(build_jaynes_cummings(), name="custom")
    with pytest.raises(UnsupportedModel):
        analytic_density(m, 1.0)
