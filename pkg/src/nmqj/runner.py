"""Scenario execution: run, compare against oracles, write artifacts."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import RunConfig, build_model
from .engine import run_simulation
from .oracle import analytic_series, integrate_master_equation, positivity_scan
from .series import (
    TrajectorySeries,
    compare_series,
    write_csv,
    write_events_ndjson,
    write_series_json,
)

EXIT_OK = 0
EXIT_COMPARISON_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 3


@dataclass
class ScenarioResult:
    exit_code: int
    summary: dict
    outdir: Path
    series: TrajectorySeries
    references: dict[str, TrajectorySeries]


def _complex_matrix_payload(m: np.ndarray) -> dict:
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def run_scenario(cfg: RunConfig, base_dir: str | Path | None = None) -> ScenarioResult:
    """Run one scenario and write series, event log, summary and comparisons."""
    t_start = time.perf_counter()
    outdir = Path(base_dir) / cfg.outputs.directory if base_dir else Path(cfg.outputs.directory)
    outdir.mkdir(parents=True, exist_ok=True)

    model = build_model(cfg.model)
    sim = run_simulation(model, cfg.engine)
    series = TrajectorySeries(
        times=sim.times,
        rho=sim.rho,
        rates=sim.rates,
        counts=sim.counts,
        events=sim.events,
        basis_labels=model.basis_labels,
    )

    if "csv" in cfg.outputs.formats:
        write_csv(series, outdir / "series.csv")
    if "json" in cfg.outputs.formats:
        write_series_json(series, outdir / "series.json")
    write_events_ndjson(sim.events, outdir / "events.ndjson")

    references: dict[str, TrajectorySeries] = {}
    comparisons: dict[str, dict] = {}
    for name in cfg.comparison.oracles:
        if name == "analytic":
            ref = analytic_series(model, series.times)
        else:
            ref = integrate_master_equation(
                model, cfg.engine.t_max, dt_int=cfg.engine.dt / 10.0,
                record_times=series.times,
            )
        references[name] = ref
        report = compare_series(series, ref, cfg.comparison.tolerance)
        comparisons[name] = report.summary_dict()
    if "analytic" in references and "rk4" in references:
        cross = compare_series(references["analytic"], references["rk4"], 1e-6)
        comparisons["analytic_vs_rk4"] = cross.summary_dict()

    n_eff = sim.n_eff()
    noise_floor = 5.0 * np.sqrt(1.0 / cfg.engine.ensemble_size)
    positivity_mc = positivity_scan(series, tol=noise_floor)
    positivity_ref = None
    ref_for_scan = references.get("rk4") or references.get("analytic")
    if ref_for_scan is not None:
        positivity_ref = positivity_scan(ref_for_scan, tol=1e-6)

    memory_loss = sim.memory_loss[0] if sim.memory_loss else None
    warnings = []
    if positivity_ref is not None:
        warnings.append(
            f"master-equation solution loses positivity at t ~ {positivity_ref:.3g}; "
            "the sampled ensemble stays physical and departs from it there"
        )
    if memory_loss is not None:
        warnings.append(
            f"entry {memory_loss[1]} emptied at t = {memory_loss[0]:.3g} while its "
            "reverse channel was still negative (ensemble memory lost)"
        )

    summary = {
        "model": {
            "name": model.name,
            "dim": model.dim,
            "basis_labels": list(model.basis_labels),
            "lamb_shift_enabled": model.lamb_shift_enabled,
        },
        "engine": {
            "dt": cfg.engine.dt,
            "t_max": cfg.engine.t_max,
            "ensemble_size": cfg.engine.ensemble_size,
            "rng_seed": cfg.engine.rng_seed,
            "record_stride": cfg.engine.record_stride,
            "max_jump_prob": cfg.engine.max_jump_prob,
        },
        "final_rho": _complex_matrix_payload(series.rho[-1]),
        "n_eff": {
            "min": int(n_eff.min()),
            "max": int(n_eff.max()),
            "final": int(n_eff[-1]),
            "series": [int(x) for x in n_eff],
        },
        "positivity": {
            "ensemble_loss_time": positivity_mc,
            "reference_loss_time": positivity_ref,
            "ensemble_tolerance": noise_floor,
        },
        "memory_loss": (
            {"time": memory_loss[0], "entry": memory_loss[1]} if memory_loss else None
        ),
        "registry_grew_during_all_negative": sim.grew_during_all_negative,
        "total_jump_events": len(sim.events),
        "comparisons": comparisons,
        "warnings": warnings,
        "runtime_seconds": time.perf_counter() - t_start,
    }

    (outdir / "summary.json").write_text(json.dumps(summary, indent=2))

    if cfg.outputs.figures:
        from . import report as report_mod

        report_mod.render_run(outdir, series, references)

    failed = any(not c["passed"] for k, c in comparisons.items() if k in cfg.comparison.oracles)
    return ScenarioResult(
        exit_code=EXIT_COMPARISON_FAILED if failed else EXIT_OK,
        summary=summary,
        outdir=outdir,
        series=series,
        references=references,
    )
