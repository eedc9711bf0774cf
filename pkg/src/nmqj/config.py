"""Run configuration: JSON parsing, validation, model construction.

Every field defaults to the reference parameter set (dt = 0.01, ensemble of
1e5 members, two-level model with coupling 5 and detuning 5).  Unknown keys
are rejected so typos fail loudly instead of silently running defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .engine import EngineConfig
from .errors import ConfigError, ParseError
from .models import (
    MODEL_BUILDERS,
    ModelSpec,
    build_jaynes_cummings,
    build_ladder,
    build_lambda,
    build_vee,
)
from .reservoir import DEFAULT_CAVITY_FREQ

KNOWN_ORACLES = ("analytic", "rk4")
KNOWN_FORMATS = ("csv", "json")
CHANNEL_COUNT = {"jc": 1, "lambda": 2, "vee": 2, "ladder": 2}


@dataclass(frozen=True)
class ModelConfig:
    name: str = "jc"
    coupling: float | None = None
    detunings: tuple[float, ...] | None = None
    initial_amplitudes: tuple[complex, ...] | None = None
    lamb_shift: bool = False
    ladder_initial: str = "mixed_start"
    width: float = 1.0
    cavity_freq: float = DEFAULT_CAVITY_FREQ


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    formats: tuple[str, ...] = ("csv", "json")
    figures: bool = False


@dataclass(frozen=True)
class ComparisonConfig:
    oracles: tuple[str, ...] = ("analytic", "rk4")
    tolerance: float = 0.01


@dataclass(frozen=True)
class RunConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    engine: EngineConfig = field(default_factory=EngineConfig)
    outputs: OutputConfig = field(default_factory=OutputConfig)
    comparison: ComparisonConfig = field(default_factory=ComparisonConfig)


def _reject_unknown(section: str, data: dict, allowed: Sequence[str]):
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {section!r}: {', '.join(unknown)}")


def _is_number(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _amplitude(entry: Any, where: str) -> complex:
    if _is_number(entry):
        return complex(entry)
    if isinstance(entry, (list, tuple)) and len(entry) == 2 and all(
        _is_number(x) for x in entry
    ):
        return complex(entry[0], entry[1])
    raise ConfigError(f"{where}: amplitudes must be numbers or [re, im] pairs")


def _parse_model(data: dict) -> ModelConfig:
    _reject_unknown(
        "model",
        data,
        (
            "name",
            "coupling",
            "detunings",
            "initial_amplitudes",
            "lamb_shift",
            "ladder_initial",
            "width",
            "cavity_freq",
        ),
    )
    name = data.get("name", "jc")
    if name not in MODEL_BUILDERS:
        raise ConfigError(
            f"unknown model {name!r}; expected one of {sorted(MODEL_BUILDERS)}"
        )
    cfg = ModelConfig(
        name=name,
        coupling=data.get("coupling"),
        detunings=tuple(data["detunings"]) if "detunings" in data else None,
        initial_amplitudes=(
            tuple(_amplitude(x, "model.initial_amplitudes") for x in data["initial_amplitudes"])
            if "initial_amplitudes" in data
            else None
        ),
        lamb_shift=bool(data.get("lamb_shift", False)),
        ladder_initial=data.get("ladder_initial", "mixed_start"),
        width=float(data.get("width", 1.0)),
        cavity_freq=float(data.get("cavity_freq", DEFAULT_CAVITY_FREQ)),
    )
    if cfg.coupling is not None and cfg.coupling <= 0:
        raise ConfigError("model.coupling must be positive")
    if cfg.width <= 0:
        raise ConfigError("model.width must be positive")
    if cfg.detunings is not None and len(cfg.detunings) != CHANNEL_COUNT[name]:
        raise ConfigError(
            f"model {name!r} takes {CHANNEL_COUNT[name]} detuning(s), "
            f"got {len(cfg.detunings)}"
        )
    if cfg.ladder_initial not in ("mixed_start", "excited_start"):
        raise ConfigError(
            "model.ladder_initial must be 'mixed_start' or 'excited_start'"
        )
    if cfg.initial_amplitudes is not None:
        dim = 2 if name == "jc" else 3
        if len(cfg.initial_amplitudes) != dim:
            raise ConfigError(
                f"model {name!r} needs {dim} initial amplitudes, "
                f"got {len(cfg.initial_amplitudes)}"
            )
        if np.linalg.norm(cfg.initial_amplitudes) < 1e-12:
            raise ConfigError("initial amplitudes must not all vanish")
    return cfg


def _parse_engine(data: dict) -> EngineConfig:
    _reject_unknown(
        "engine",
        data,
        ("dt", "t_max", "ensemble_size", "rng_seed", "record_stride", "max_jump_prob"),
    )
    try:
        return EngineConfig(**data)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"engine: {exc}") from exc


def _parse_outputs(data: dict) -> OutputConfig:
    _reject_unknown("outputs", data, ("directory", "formats", "figures"))
    formats = tuple(data.get("formats", ("csv", "json")))
    for f in formats:
        if f not in KNOWN_FORMATS:
            raise ConfigError(f"outputs.formats: unknown format {f!r}")
    return OutputConfig(
        directory=str(data.get("directory", "out")),
        formats=formats,
        figures=bool(data.get("figures", False)),
    )


def _parse_comparison(data: dict) -> ComparisonConfig:
    _reject_unknown("comparison", data, ("oracles", "tolerance"))
    oracles = tuple(data.get("oracles", KNOWN_ORACLES))
    for o in oracles:
        if o not in KNOWN_ORACLES:
            raise ConfigError(f"comparison.oracles: unknown oracle {o!r}")
    tol = float(data.get("tolerance", 0.01))
    if tol <= 0:
        raise ConfigError("comparison.tolerance must be positive")
    return ComparisonConfig(oracles=oracles, tolerance=tol)


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON run configuration."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ParseError("configuration must be a JSON object")
    _reject_unknown("top level", data, ("model", "engine", "outputs", "comparison"))
    for key in data:
        if not isinstance(data[key], dict):
            raise ConfigError(f"section {key!r} must be a JSON object")
    return RunConfig(
        model=_parse_model(data.get("model", {})),
        engine=_parse_engine(data.get("engine", {})),
        outputs=_parse_outputs(data.get("outputs", {})),
        comparison=_parse_comparison(data.get("comparison", {})),
    )


def load_config(path) -> RunConfig:
    from pathlib import Path

    return parse_config(Path(path).read_text())


def build_model(mc: ModelConfig) -> ModelSpec:
    """Instantiate the configured model, applying parameter overrides."""
    common = dict(
        lamb_shift_enabled=mc.lamb_shift, width=mc.width, cavity_freq=mc.cavity_freq
    )
    if mc.coupling is not None:
        common["coupling"] = mc.coupling
    if mc.initial_amplitudes is not None:
        common["initial_amplitudes"] = mc.initial_amplitudes
    if mc.name == "jc":
        if mc.detunings is not None:
            common["detuning"] = mc.detunings[0]
        return build_jaynes_cummings(**common)
    if mc.detunings is not None:
        common["detunings"] = mc.detunings
    if mc.name == "lambda":
        return build_lambda(**common)
    if mc.name == "vee":
        return build_vee(**common)
    return build_ladder(initial=mc.ladder_initial, **common)
