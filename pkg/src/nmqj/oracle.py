"""Reference solutions: closed-form density matrices and an RK4 integrator.

Two independent routes are kept deliberately separate.  ``analytic_density``
assembles the density matrix from the models' formal solutions, written in
terms of the accumulated rates D_i(t) and L_i(t); nested integrals (the
cascade populations) are evaluated on a refined grid by cumulative trapezoid
with Richardson extrapolation.  ``integrate_master_equation`` knows nothing
of those formulas and integrates the master equation right-hand side with a
fixed-step classical Runge-Kutta scheme.

The level-shift phase factors on the coherences are included exactly when
the model evolves with the shift Hamiltonian, so both routes always solve
the same equation.  Cross-source comparisons still use coherence magnitudes
(see series.compare_series), where those phases drop out.

One widely copied form of the cascade-system coherence carries a sign slip
that would make the ab coherence grow under decay; the expressions here are
the ones that actually satisfy the master equation, which the finite
difference tests verify directly.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .errors import UnsupportedModel
from .models import ModelSpec, master_rhs
from .series import TrajectorySeries

FINE_STEP = 5e-4  # refinement target for the nested cascade integrals


def _richardson_cumulative(f, query_times: np.ndarray) -> np.ndarray:
    """Cumulative integral of f from 0 at each query time.

    Per segment between consecutive query points, trapezoid sums on a fine
    grid (step <= FINE_STEP, even subinterval count) are Richardson-combined
    with the half-resolution sums, which is fourth-order accurate for the
    smooth integrands used here.
    """
    out = np.zeros(len(query_times))
    acc = 0.0
    prev = 0.0
    for k, t in enumerate(query_times):
        if t < prev:
            raise ValueError("query times must be non-decreasing")
        if t > prev:
            m = 2 * int(np.ceil((t - prev) / (2.0 * FINE_STEP)))
            xs = np.linspace(prev, t, m + 1)
            ys = f(xs)
            h = xs[1] - xs[0]
            t_h = np.trapezoid(ys, dx=h)
            t_2h = np.trapezoid(ys[::2], dx=2.0 * h)
            acc += (4.0 * t_h - t_2h) / 3.0
        out[k] = acc
        prev = t
    return out


def _accumulated(model: ModelSpec, times: np.ndarray):
    d_acc = [ch.rate.accumulated_decay(times) for ch in model.channels]
    if model.lamb_shift_enabled:
        l_acc = [ch.rate.accumulated_lamb_shift(times) for ch in model.channels]
    else:
        l_acc = [np.zeros_like(times) for _ in model.channels]
    return d_acc, l_acc


def analytic_series(model: ModelSpec, times) -> TrajectorySeries:
    """Formal solution of the master equation evaluated on a time grid."""
    times = np.asarray(times, dtype=float)
    rho0 = linalg.outer(model.initial_state)
    d_acc, l_acc = _accumulated(model, times)
    rho = np.empty((len(times), model.dim, model.dim), dtype=complex)

    if model.name == "jc":
        d1, l1 = d_acc[0], l_acc[0]
        rho[:, 0, 0] = np.exp(-d1) * rho0[0, 0]
        rho[:, 1, 1] = rho0[1, 1] + (1.0 - np.exp(-d1)) * rho0[0, 0]
        rho[:, 0, 1] = np.exp(-1j * l1 - d1 / 2.0) * rho0[0, 1]
        rho[:, 1, 0] = rho[:, 0, 1].conj()
    elif model.name == "lambda":
        d1, d2 = d_acc
        l1, l2 = l_acc
        rate1 = model.channels[0].rate
        rate2 = model.channels[1].rate
        drain = _richardson_cumulative(
            lambda s: rate1.decay_rate(s)
            * np.exp(-(rate1.accumulated_decay(s) + rate2.accumulated_decay(s))),
            times,
        )
        drain2 = _richardson_cumulative(
            lambda s: rate2.decay_rate(s)
            * np.exp(-(rate1.accumulated_decay(s) + rate2.accumulated_decay(s))),
            times,
        )
        rho[:, 0, 0] = np.exp(-(d1 + d2)) * rho0[0, 0]
        rho[:, 1, 1] = rho0[1, 1] + drain * rho0[0, 0]
        rho[:, 2, 2] = rho0[2, 2] + drain2 * rho0[0, 0]
        shared = np.exp(-1j * (l1 + l2) - (d1 + d2) / 2.0)
        rho[:, 0, 1] = shared * rho0[0, 1]
        rho[:, 0, 2] = shared * rho0[0, 2]
        rho[:, 1, 2] = rho0[1, 2] * np.ones_like(d1)
        _fill_conjugates(rho)
    elif model.name == "vee":
        d1, d2 = d_acc
        l1, l2 = l_acc
        rho[:, 0, 0] = np.exp(-d1) * rho0[0, 0]
        rho[:, 1, 1] = np.exp(-d2) * rho0[1, 1]
        rho[:, 2, 2] = (
            rho0[2, 2]
            + (1.0 - np.exp(-d1)) * rho0[0, 0]
            + (1.0 - np.exp(-d2)) * rho0[1, 1]
        )
        rho[:, 0, 1] = np.exp(-1j * (l1 - l2) - (d1 + d2) / 2.0) * rho0[0, 1]
        rho[:, 0, 2] = np.exp(-1j * l1 - d1 / 2.0) * rho0[0, 2]
        rho[:, 1, 2] = np.exp(-1j * l2 - d2 / 2.0) * rho0[1, 2]
        _fill_conjugates(rho)
    elif model.name == "ladder":
        d1, d2 = d_acc
        l1, l2 = l_acc
        rate1 = model.channels[0].rate
        rate2 = model.channels[1].rate
        cascade = _richardson_cumulative(
            lambda s: rate1.decay_rate(s)
            * np.exp(-rate1.accumulated_decay(s) + rate2.accumulated_decay(s)),
            times,
        )
        rho[:, 0, 0] = np.exp(-d1) * rho0[0, 0]
        rho[:, 1, 1] = np.exp(-d2) * (rho0[1, 1] + cascade * rho0[0, 0])
        rho[:, 2, 2] = 1.0 - rho[:, 0, 0].real - rho[:, 1, 1].real
        rho[:, 0, 1] = np.exp(-1j * (l1 - l2) - (d1 + d2) / 2.0) * rho0[0, 1]
        rho[:, 0, 2] = np.exp(-1j * l1 - d1 / 2.0) * rho0[0, 2]
        rho[:, 1, 2] = np.exp(-1j * l2 - d2 / 2.0) * rho0[1, 2]
        _fill_conjugates(rho)
    else:
        raise UnsupportedModel(f"no closed-form solution for model {model.name!r}")

    rates = np.stack([ch.rate.decay_rate(times) for ch in model.channels], axis=1)
    return TrajectorySeries(
        times=times, rho=rho, rates=rates, counts=None,
        basis_labels=model.basis_labels,
    )


def _fill_conjugates(rho: np.ndarray):
    d = rho.shape[1]
    for i in range(d):
        for j in range(i + 1, d):
            rho[:, j, i] = rho[:, i, j].conj()


def analytic_density(model: ModelSpec, t: float) -> np.ndarray:
    """Closed-form density matrix at a single time."""
    if t == 0.0:
        return analytic_series(model, np.array([0.0])).rho[0]
    return analytic_series(model, np.array([0.0, float(t)])).rho[1]


class AnalyticSolution:
    """Callable wrapper: evaluates the formal solution of a supported model."""

    def __init__(self, model: ModelSpec):
        if model.name not in ("jc", "lambda", "vee", "ladder"):
            raise UnsupportedModel(f"no closed-form solution for {model.name!r}")
        self.model = model

    def __call__(self, t: float) -> np.ndarray:
        return analytic_density(self.model, t)

    def series(self, times) -> TrajectorySeries:
        return analytic_series(self.model, times)


def integrate_master_equation(
    model: ModelSpec,
    t_max: float,
    dt_int: float = 1e-3,
    record_times=None,
) -> TrajectorySeries:
    """Fixed-step RK4 integration of the master equation with signed rates.

    Rates are precomputed on the half-step grid; Hermiticity is restored
    after every step to stop rounding drift.  Records on ``record_times``
    (defaults to every 0.1), which must lie on the integration grid.
    """
    if dt_int <= 0:
        raise ValueError("dt_int must be positive")
    n = int(round(t_max / dt_int))
    if abs(n * dt_int - t_max) > 1e-9:
        raise ValueError("t_max must be an integer multiple of dt_int")
    if record_times is None:
        stride = max(1, int(round(0.1 / dt_int)))
        record_times = np.arange(0, n + 1, stride) * dt_int
        if (n % stride) != 0:
            record_times = np.append(record_times, n * dt_int)
    record_times = np.asarray(record_times, dtype=float)
    rec_idx = np.round(record_times / dt_int).astype(int)
    if np.max(np.abs(rec_idx * dt_int - record_times)) > 1e-9:
        raise ValueError("record_times must lie on the integration grid")

    half_grid = np.arange(2 * n + 1) * (dt_int / 2.0)
    delta_half = np.stack(
        [ch.rate.decay_rate(half_grid) for ch in model.channels], axis=1
    )
    lam_half = np.stack(
        [ch.rate.lamb_shift_rate(half_grid) for ch in model.channels], axis=1
    )

    def rhs(half_index: int, rho: np.ndarray) -> np.ndarray:
        return master_rhs(
            model, rho, delta_rates=delta_half[half_index], lam_rates=lam_half[half_index]
        )

    rho = linalg.outer(model.initial_state)
    want = {int(i): k for k, i in enumerate(rec_idx)}
    out = np.empty((len(record_times), model.dim, model.dim), dtype=complex)
    if 0 in want:
        out[want[0]] = rho
    for k in range(n):
        k1 = rhs(2 * k, rho)
        k2 = rhs(2 * k + 1, rho + 0.5 * dt_int * k1)
        k3 = rhs(2 * k + 1, rho + 0.5 * dt_int * k2)
        k4 = rhs(2 * k + 2, rho + dt_int * k3)
        rho = rho + (dt_int / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        if (k + 1) in want:
            out[want[k + 1]] = rho

    rates = np.stack([ch.rate.decay_rate(record_times) for ch in model.channels], axis=1)
    return TrajectorySeries(
        times=record_times, rho=out, rates=rates, counts=None,
        basis_labels=model.basis_labels,
    )


def positivity_scan(series: TrajectorySeries, tol: float = 1e-6):
    """Earliest grid time with a density-matrix eigenvalue below -tol, or None."""
    for k in range(len(series.times)):
        if linalg.min_eigenvalue(series.rho[k]) < -tol:
            return float(series.times[k])
    return None


def rate_equation_sign_check(model: ModelSpec, series: TrajectorySeries) -> bool:
    """Monotonicity of the two-level populations against the rate sign.

    On every grid interval strictly inside one sign window of the decay rate:
    positive rate must shrink the excited population and the coherence and
    grow the ground population; negative rate the opposite.  Tolerance per
    interval is dt * max|rate| * 1e-2 to absorb discretization noise.
    """
    if model.dim != 2 or len(model.channels) != 1:
        raise UnsupportedModel("sign check applies to the two-level model only")
    rate = model.channels[0].rate
    times = series.times
    p_exc = series.rho[:, 0, 0].real
    p_gnd = series.rho[:, 1, 1].real
    coh = np.abs(series.rho[:, 0, 1])
    ok = True
    for k in range(len(times) - 1):
        t0, t1 = times[k], times[k + 1]
        r0, r1 = float(rate.decay_rate(t0)), float(rate.decay_rate(t1))
        rm = float(rate.decay_rate(0.5 * (t0 + t1)))
        signs = {np.sign(r0), np.sign(r1), np.sign(rm)}
        if len(signs) != 1 or 0.0 in signs:
            continue  # interval touches a sign change
        tol = (t1 - t0) * max(abs(r0), abs(r1), abs(rm)) * 1e-2
        d_exc = p_exc[k + 1] - p_exc[k]
        d_gnd = p_gnd[k + 1] - p_gnd[k]
        d_coh = coh[k + 1] - coh[k]
        if r0 > 0:
            ok &= d_exc <= tol and d_gnd >= -tol and d_coh <= tol
        else:
            ok &= d_exc >= -tol and d_gnd <= tol and d_coh >= -tol
    return bool(ok)
