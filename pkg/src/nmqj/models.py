"""Atomic level schemes coupled to a Lorentzian reservoir.

Four concrete builders reproduce the standard two- and three-level geometries
(two-level atom in a detuned cavity, and the lambda, vee and ladder
three-level schemes).  Each jump operator is a single-transition lowering
operator |i><j| with unit dipole element; the system Hamiltonian in the
interaction picture is the reservoir-induced level shift only, toggled by
``lamb_shift_enabled``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import UnsupportedModel
from .reservoir import DEFAULT_CAVITY_FREQ, LorentzianChannelRate, LorentzianReservoir
from . import linalg

JC_COUPLING = 5.0
THREE_LEVEL_COUPLING = 2.0
JC_DETUNING = 5.0
THREE_LEVEL_DETUNINGS = (-3.0, 5.0)


@dataclass(frozen=True)
class ChannelSpec:
    """One decay channel: jump operator plus its time-dependent rates."""

    label: int
    jump_op: np.ndarray
    rate: object  # anything with decay_rate / lamb_shift_rate / accumulated_*


@dataclass(frozen=True)
class ModelSpec:
    name: str
    dim: int
    basis_labels: tuple[str, ...]
    channels: tuple[ChannelSpec, ...]
    initial_state: np.ndarray
    lamb_shift_enabled: bool = False

    def __post_init__(self):
        object.__setattr__(
            self, "initial_state", linalg.normalize(self.initial_state)
        )
        for ch in self.channels:
            if ch.jump_op.shape != (self.dim, self.dim):
                raise ValueError(
                    f"channel {ch.label} operator shape {ch.jump_op.shape} "
                    f"does not match dim {self.dim}"
                )

    def decay_rates(self, t) -> np.ndarray:
        """Vector of channel decay rates at time t (signed)."""
        return np.array([ch.rate.decay_rate(t) for ch in self.channels])

    def lamb_shift_rates(self, t) -> np.ndarray:
        return np.array([ch.rate.lamb_shift_rate(t) for ch in self.channels])


def _lowering(dim: int, target: int, source: int) -> np.ndarray:
    c = np.zeros((dim, dim), dtype=complex)
    c[target, source] = 1.0
    return c


def _lorentzian_channels(
    dim: int,
    transitions: Sequence[tuple[int, int]],
    detunings: Sequence[float],
    coupling: float,
    width: float,
    cavity_freq: float,
) -> tuple[ChannelSpec, ...]:
    reservoir = LorentzianReservoir(
        coupling=coupling, width=width, cavity_freq=cavity_freq
    )
    channels = []
    for k, ((tgt, src), det) in enumerate(zip(transitions, detunings), start=1):
        channels.append(
            ChannelSpec(
                label=k,
                jump_op=_lowering(dim, tgt, src),
                rate=LorentzianChannelRate(detuning=det, reservoir=reservoir),
            )
        )
    return tuple(channels)


def build_jaynes_cummings(
    coupling: float = JC_COUPLING,
    detuning: float = JC_DETUNING,
    initial_amplitudes: Sequence[complex] = (3.0, 2.0),
    lamb_shift_enabled: bool = False,
    width: float = 1.0,
    cavity_freq: float = DEFAULT_CAVITY_FREQ,
) -> ModelSpec:
    """Two-level atom, single lowering channel |b><a|, default start (3,2)/sqrt(13)."""
    return ModelSpec(
        name="jc",
        dim=2,
        basis_labels=("a", "b"),
        channels=_lorentzian_channels(2, [(1, 0)], [detuning], coupling, width, cavity_freq),
        initial_state=np.asarray(initial_amplitudes, dtype=complex),
        lamb_shift_enabled=lamb_shift_enabled,
    )


def build_lambda(
    coupling: float = THREE_LEVEL_COUPLING,
    detunings: Sequence[float] = THREE_LEVEL_DETUNINGS,
    initial_amplitudes: Sequence[complex] = (4.0, 2.0, 1.0),
    lamb_shift_enabled: bool = False,
    width: float = 1.0,
    cavity_freq: float = DEFAULT_CAVITY_FREQ,
) -> ModelSpec:
    """Lambda scheme: both channels drain the shared excited level |a>."""
    return ModelSpec(
        name="lambda",
        dim=3,
        basis_labels=("a", "b", "c"),
        channels=_lorentzian_channels(
            3, [(1, 0), (2, 0)], detunings, coupling, width, cavity_freq
        ),
        initial_state=np.asarray(initial_amplitudes, dtype=complex),
        lamb_shift_enabled=lamb_shift_enabled,
    )


def build_vee(
    coupling: float = THREE_LEVEL_COUPLING,
    detunings: Sequence[float] = THREE_LEVEL_DETUNINGS,
    initial_amplitudes: Sequence[complex] = (1.0, 1.0, 1.0),
    lamb_shift_enabled: bool = False,
    width: float = 1.0,
    cavity_freq: float = DEFAULT_CAVITY_FREQ,
) -> ModelSpec:
    """Vee scheme: both upper levels decay into the shared ground level |c>."""
    return ModelSpec(
        name="vee",
        dim=3,
        basis_labels=("a", "b", "c"),
        channels=_lorentzian_channels(
            3, [(2, 0), (2, 1)], detunings, coupling, width, cavity_freq
        ),
        initial_state=np.asarray(initial_amplitudes, dtype=complex),
        lamb_shift_enabled=lamb_shift_enabled,
    )


LADDER_STARTS = {
    "mixed_start": (4.0, 2.0, 1.0),
    "excited_start": (1.0, 0.0, 0.0),
}


def build_ladder(
    initial: str = "mixed_start",
    coupling: float = THREE_LEVEL_COUPLING,
    detunings: Sequence[float] = THREE_LEVEL_DETUNINGS,
    initial_amplitudes: Sequence[complex] | None = None,
    lamb_shift_enabled: bool = False,
    width: float = 1.0,
    cavity_freq: float = DEFAULT_CAVITY_FREQ,
) -> ModelSpec:
    """Ladder scheme: cascade a -> b -> c; channel 2 drains channel 1's target."""
    if initial_amplitudes is None:
        try:
            initial_amplitudes = LADDER_STARTS[initial]
        except KeyError:
            raise UnsupportedModel(
                f"unknown ladder initial condition {initial!r}; "
                f"expected one of {sorted(LADDER_STARTS)}"
            ) from None
    return ModelSpec(
        name="ladder",
        dim=3,
        basis_labels=("a", "b", "c"),
        channels=_lorentzian_channels(
            3, [(1, 0), (2, 1)], detunings, coupling, width, cavity_freq
        ),
        initial_state=np.asarray(initial_amplitudes, dtype=complex),
        lamb_shift_enabled=lamb_shift_enabled,
    )


MODEL_BUILDERS = {
    "jc": build_jaynes_cummings,
    "lambda": build_lambda,
    "vee": build_vee,
    "ladder": build_ladder,
}


def lamb_shift_hamiltonian(model: ModelSpec, lam_rates: np.ndarray) -> np.ndarray:
    """H_LS = sum_j lambda_j(t) C_j^dag C_j (hbar = 1); zero when disabled."""
    h = np.zeros((model.dim, model.dim), dtype=complex)
    if not model.lamb_shift_enabled:
        return h
    for ch, lam in zip(model.channels, lam_rates):
        h += lam * (ch.jump_op.conj().T @ ch.jump_op)
    return h


def master_rhs(model: ModelSpec, rho: np.ndarray, t: float | None = None,
               delta_rates: np.ndarray | None = None,
               lam_rates: np.ndarray | None = None) -> np.ndarray:
    """Right-hand side of the time-local master equation with signed rates.

    Rates may be passed explicitly (precomputed grids) or looked up at t.
    """
    if delta_rates is None:
        delta_rates = model.decay_rates(t)
    if lam_rates is None:
        lam_rates = model.lamb_shift_rates(t)
    h = lamb_shift_hamiltonian(model, lam_rates)
    out = -1j * (h @ rho - rho @ h)
    for ch, dj in zip(model.channels, delta_rates):
        c = ch.jump_op
        cdc = c.conj().T @ c
        out += dj * (c @ rho @ c.conj().T - 0.5 * (cdc @ rho + rho @ cdc))
    return out


def with_constant_rates(model: ModelSpec, decays: Sequence[float]) -> ModelSpec:
    """Copy of the model with constant (memoryless) channel rates."""
    from .reservoir import ConstantRate

    channels = tuple(
        replace(ch, rate=ConstantRate(decay=g)) for ch, g in zip(model.channels, decays)
    )
    return replace(model, channels=channels)
