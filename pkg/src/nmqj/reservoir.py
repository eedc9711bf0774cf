"""Time-dependent decay and level-shift rates for a Lorentzian reservoir.

A structured reservoir (single leaky cavity mode) has spectral density

    J(nu) = (alpha^2 / 2 pi) * width / ((nu - cavity_freq)^2 + (width/2)^2)

All frequencies and rates are expressed in units of the distribution width
(``width`` = Gamma = 1 by default), times in Gamma^-1.  Each decay channel
with detuning ``delta = cavity_freq - bohr_freq`` carries the second-order
time-local rates

    decay(t)      = 2 * int_0^t ds int_0^inf dnu J(nu) cos((nu - bohr) s)
    level_shift(t) =     int_0^t ds int_0^inf dnu J(nu) sin((nu - bohr) s)

Because cavity_freq >> width, the nu integral may be extended over the whole
real line (broadband approximation), which makes the inner integral
alpha^2 * exp(-width*s/2) * cos(delta*s) and yields the closed forms used
here.  The quadrature routines in this module evaluate the literal half-line
double integrals numerically and exist solely to validate the closed forms;
they never feed the simulation itself.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import NegativeTime

DEFAULT_CAVITY_FREQ = 1000.0


def _check_time(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise NegativeTime("rates are defined for t >= 0 only")
    return t


@dataclass(frozen=True)
class LorentzianReservoir:
    """Lorentzian spectral density of width ``width`` centred at ``cavity_freq``.

    ``coupling`` is the squared coupling constant alpha^2 (units width^2); it
    equals the full integral of J over the real line.
    """

    coupling: float
    width: float = 1.0
    cavity_freq: float = DEFAULT_CAVITY_FREQ

    def __post_init__(self):
        if self.coupling <= 0:
            raise ValueError("coupling alpha^2 must be positive")
        if self.width <= 0:
            raise ValueError("width must be positive")
        if self.cavity_freq <= 10 * self.width:
            raise ValueError("cavity_freq must be large compared to the width")

    def spectral_density(self, nu) -> np.ndarray:
        nu = np.asarray(nu, dtype=float)
        half = self.width / 2.0
        return (self.coupling / (2.0 * np.pi)) * self.width / (
            (nu - self.cavity_freq) ** 2 + half**2
        )


@dataclass(frozen=True)
class LorentzianChannelRate:
    """Rates for one decay channel of a Lorentzian reservoir.

    Deterministic: the same (t, detuning, coupling, width) always produces the
    same values.  Closed forms are exact under the broadband approximation;
    see the *_quadrature methods for the independent checks.
    """

    detuning: float
    reservoir: LorentzianReservoir

    # -- closed forms -----------------------------------------------------

    def _gc(self, t):
        # int_0^t exp(-a s) cos(delta s) ds
        a = self.reservoir.width / 2.0
        d = self.detuning
        return (a + np.exp(-a * t) * (d * np.sin(d * t) - a * np.cos(d * t))) / (
            a * a + d * d
        )

    def _gs(self, t):
        # int_0^t exp(-a s) sin(delta s) ds
        a = self.reservoir.width / 2.0
        d = self.detuning
        return (d - np.exp(-a * t) * (d * np.cos(d * t) + a * np.sin(d * t))) / (
            a * a + d * d
        )

    def decay_rate(self, t):
        """Decay rate at time t (may be negative); accepts arrays."""
        t = _check_time(t)
        return 2.0 * self.reservoir.coupling * self._gc(t)

    def lamb_shift_rate(self, t):
        """Level-shift rate at time t; odd in the detuning; accepts arrays."""
        t = _check_time(t)
        return self.reservoir.coupling * self._gs(t)

    def accumulated_decay(self, t):
        """int_0^t decay_rate(s) ds from the exact antiderivative."""
        t = _check_time(t)
        a = self.reservoir.width / 2.0
        d = self.detuning
        return (
            2.0
            * self.reservoir.coupling
            * (a * t + d * self._gs(t) - a * self._gc(t))
            / (a * a + d * d)
        )

    def accumulated_lamb_shift(self, t):
        """int_0^t lamb_shift_rate(s) ds from the exact antiderivative."""
        t = _check_time(t)
        a = self.reservoir.width / 2.0
        d = self.detuning
        return (
            self.reservoir.coupling
            * (d * t - d * self._gc(t) - a * self._gs(t))
            / (a * a + d * d)
        )

    def markov_decay_rate(self) -> float:
        """t -> infinity limit of the decay rate (golden-rule value 2 pi J(bohr))."""
        a = self.reservoir.width / 2.0
        d = self.detuning
        return 2.0 * self.reservoir.coupling * a / (a * a + d * d)

    def markov_lamb_shift_rate(self) -> float:
        a = self.reservoir.width / 2.0
        d = self.detuning
        return self.reservoir.coupling * d / (a * a + d * d)

    # -- quadrature oracles ------------------------------------------------
    #
    # The double integral with the s-integration done first (the s-integral
    # of cos/sin is elementary) collapses to a single nu-integral:
    #
    #   decay(t)      = 2 int_0^inf J(nu) sin((nu - bohr) t) / (nu - bohr) dnu
    #   level_shift(t) =  int_0^inf J(nu) (1 - cos((nu - bohr) t)) / (nu - bohr) dnu
    #
    # The kernel is smooth (removable singularity at nu = bohr).  A window
    # around the Lorentzian peak is integrated directly; the decaying tails
    # use Fourier-weighted quadrature out to infinity so the full half-line
    # of the defining formula is covered.

    @property
    def bohr_freq(self) -> float:
        return self.reservoir.cavity_freq - self.detuning

    def _oscillatory_sum(self, t: float, lo: float, hi: float, eps: float,
                         trig: str) -> float:
        """int J(nu) trig((nu - bohr) t) / (nu - bohr) dnu over the half line.

        The removable singularity at the Bohr frequency sits inside a plain
        window of one oscillation period; everything else (including the
        Lorentzian peak) is handled with Fourier-weighted quadrature, which
        stays cheap no matter how many cycles the window spans.
        """
        om = self.bohr_freq
        j = self.reservoir.spectral_density
        g = lambda nu: j(nu) / (nu - om)
        if trig == "sin":
            kernel = lambda nu: j(nu) * t * np.sinc((nu - om) * t / np.pi)
        else:  # 1 - cos
            kernel = lambda nu: j(nu) * t * np.sinc(
                (nu - om) * t / (2.0 * np.pi)
            ) * np.sin((nu - om) * t / 2.0)
        pts = [p for p in (om, self.reservoir.cavity_freq) if om - eps < p < om + eps]
        total = quad(kernel, om - eps, om + eps, points=pts or None,
                     limit=200, epsabs=1e-11, epsrel=1e-11)[0]

        cs, sn = np.cos(om * t), np.sin(om * t)
        opts = dict(wvar=t, limit=400, epsabs=1e-11)
        for a, b in ((om + eps, hi), (lo, om - eps), (0.0, lo)):
            if b <= a:
                continue
            ic = quad(g, a, b, weight="cos", **opts)[0]
            isn = quad(g, a, b, weight="sin", **opts)[0]
            if trig == "sin":
                # sin((nu-om)t) = sin(nu t) cos(om t) - cos(nu t) sin(om t)
                total += cs * isn - sn * ic
            else:
                # 1 - cos((nu-om)t) = 1 - cos(nu t) cos(om t) - sin(nu t) sin(om t)
                total += quad(g, a, b, epsabs=1e-11, limit=200)[0] - cs * ic - sn * isn
        # decaying upper tail out to infinity
        ic = quad(g, hi, np.inf, weight="cos", wvar=t)[0]
        isn = quad(g, hi, np.inf, weight="sin", wvar=t)[0]
        if trig == "sin":
            total += cs * isn - sn * ic
        else:
            total += quad(g, hi, np.inf)[0] - cs * ic - sn * isn
        return total

    def decay_rate_quadrature(self, t: float, window: float = 40.0) -> float:
        """Adaptive quadrature of the defining double integral for the decay rate.

        The elementary s integral is carried out first, leaving
        2 int_0^inf J(nu) sin((nu - bohr) t) / (nu - bohr) dnu.
        """
        t = float(_check_time(t))
        if t == 0.0:
            return 0.0
        om = self.bohr_freq
        lo = max(0.0, om - window)
        hi = om + window
        eps = min(window, max(2.0 * np.pi / t, 2.0 * self.reservoir.width))
        return 2.0 * self._oscillatory_sum(t, lo, hi, eps, "sin")

    def lamb_shift_rate_quadrature(self, t: float, window: float = 40.0) -> float:
        """Adaptive quadrature of the defining double integral for the shift rate:
        int_0^inf J(nu) (1 - cos((nu - bohr) t)) / (nu - bohr) dnu."""
        t = float(_check_time(t))
        if t == 0.0:
            return 0.0
        om = self.bohr_freq
        lo = max(0.0, om - window)
        hi = om + window
        eps = min(window, max(2.0 * np.pi / t, 2.0 * self.reservoir.width))
        return self._oscillatory_sum(t, lo, hi, eps, "1-cos")

    def decay_rate_quadrature_nested(self, t: float, window: float = 50.0) -> float:
        """Literal nested quadrature: nu integral first, then the s integral.

        Slower than decay_rate_quadrature but follows the defining formula's
        integration order; used as a cross-check of both other routes.
        """
        t = float(_check_time(t))
        if t == 0.0:
            return 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, _ = quad(lambda s: self._inner_cos(s, window), 0.0, t, limit=200)
        return 2.0 * val

    def lamb_shift_rate_quadrature_nested(self, t: float, window: float = 50.0) -> float:
        t = float(_check_time(t))
        if t == 0.0:
            return 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, _ = quad(lambda s: self._inner_sin(s, window), 0.0, t, limit=200)
        return val

    def _inner_cos(self, s: float, window: float) -> float:
        ic, isn = self._fourier_moments(s, window)
        om = self.bohr_freq
        return np.cos(om * s) * ic + np.sin(om * s) * isn

    def _inner_sin(self, s: float, window: float) -> float:
        ic, isn = self._fourier_moments(s, window)
        om = self.bohr_freq
        return np.cos(om * s) * isn - np.sin(om * s) * ic

    def _fourier_moments(self, s: float, window: float) -> tuple[float, float]:
        """(int_0^inf J cos(nu s), int_0^inf J sin(nu s)) at fixed s."""
        return _cached_moments(
            self.reservoir.coupling,
            self.reservoir.width,
            self.reservoir.cavity_freq,
            float(s),
            float(window),
        )

    def accumulated_decay_quadrature(self, t: float) -> float:
        """Adaptive quadrature of the closed-form rate, abs tolerance 1e-8."""
        t = float(_check_time(t))
        val, _ = quad(lambda s: self.decay_rate(s), 0.0, t, epsabs=1e-8, limit=400)
        return val

    def accumulated_lamb_shift_quadrature(self, t: float) -> float:
        t = float(_check_time(t))
        val, _ = quad(lambda s: self.lamb_shift_rate(s), 0.0, t, epsabs=1e-8, limit=400)
        return val


@lru_cache(maxsize=200_000)
def _cached_moments(
    coupling: float, width: float, cavity: float, s: float, window: float
) -> tuple[float, float]:
    half = width / 2.0
    j = lambda nu: (coupling / (2.0 * np.pi)) * width / ((nu - cavity) ** 2 + half**2)
    lo = max(0.0, cavity - window)
    hi = cavity + window
    if s == 0.0:
        ic = quad(j, lo, hi, points=[cavity])[0]
        ic += quad(j, hi, np.inf)[0]
        if lo > 0.0:
            ic += quad(j, 0.0, lo)[0]
        return ic, 0.0
    ic, isn = 0.0, 0.0
    ic += quad(j, lo, hi, weight="cos", wvar=s, limit=600)[0]
    isn += quad(j, lo, hi, weight="sin", wvar=s, limit=600)[0]
    ic += quad(j, hi, np.inf, weight="cos", wvar=s)[0]
    isn += quad(j, hi, np.inf, weight="sin", wvar=s)[0]
    if lo > 0.0:
        ic += quad(j, 0.0, lo, weight="cos", wvar=s, limit=600)[0]
        isn += quad(j, 0.0, lo, weight="sin", wvar=s, limit=600)[0]
    return ic, isn


@dataclass(frozen=True)
class NumericalChannelRate:
    """Channel rates for an arbitrary spectral density, by quadrature only.

    Plugin seam for non-Lorentzian reservoirs: ``density`` is any J(nu) >= 0
    supported (numerically) within ``nu_window`` around ``bohr_freq``.  Every
    call integrates the defining formulas, so this is orders of magnitude
    slower than a closed form; the engine only evaluates rates once per grid
    point, which keeps it usable.  Only the Lorentzian case is validated.
    """

    density: object  # callable J(nu)
    bohr_freq: float
    nu_window: float = 60.0

    def _rate(self, t: float, trig: str) -> float:
        om = self.bohr_freq
        if trig == "sin":
            kernel = lambda nu: self.density(nu) * t * np.sinc((nu - om) * t / np.pi)
        else:
            kernel = lambda nu: self.density(nu) * t * np.sinc(
                (nu - om) * t / (2.0 * np.pi)
            ) * np.sin((nu - om) * t / 2.0)
        lo = max(0.0, om - self.nu_window)
        hi = om + self.nu_window
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, _ = quad(kernel, lo, hi, points=[om], limit=800,
                          epsabs=1e-10, epsrel=1e-10)
        return val

    def decay_rate(self, t):
        t = _check_time(t)
        if t.ndim:
            return np.array([self.decay_rate(float(x)) for x in t])
        t = float(t)
        return 0.0 if t == 0.0 else 2.0 * self._rate(t, "sin")

    def lamb_shift_rate(self, t):
        t = _check_time(t)
        if t.ndim:
            return np.array([self.lamb_shift_rate(float(x)) for x in t])
        t = float(t)
        return 0.0 if t == 0.0 else self._rate(t, "1-cos")

    def accumulated_decay(self, t):
        t = _check_time(t)
        if t.ndim:
            return np.array([self.accumulated_decay(float(x)) for x in t])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, _ = quad(lambda s: self.decay_rate(s), 0.0, float(t),
                          epsabs=1e-8, limit=200)
        return val

    def accumulated_lamb_shift(self, t):
        t = _check_time(t)
        if t.ndim:
            return np.array([self.accumulated_lamb_shift(float(x)) for x in t])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, _ = quad(lambda s: self.lamb_shift_rate(s), 0.0, float(t),
                          epsabs=1e-8, limit=200)
        return val


@dataclass(frozen=True)
class ConstantRate:
    """Constant rates: the memoryless limit in which the engine is plain MCWF."""

    decay: float
    lamb_shift: float = 0.0

    def decay_rate(self, t):
        t = _check_time(t)
        return np.broadcast_to(np.float64(self.decay), t.shape).copy() if t.ndim else float(self.decay)

    def lamb_shift_rate(self, t):
        t = _check_time(t)
        return np.broadcast_to(np.float64(self.lamb_shift), t.shape).copy() if t.ndim else float(self.lamb_shift)

    def accumulated_decay(self, t):
        t = _check_time(t)
        return self.decay * t

    def accumulated_lamb_shift(self, t):
        t = _check_time(t)
        return self.lamb_shift * t

    def markov_decay_rate(self) -> float:
        return float(self.decay)

    def markov_lamb_shift_rate(self) -> float:
        return float(self.lamb_shift)
