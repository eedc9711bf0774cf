"""Time-series container plus CSV / JSON serialization and comparison.

CSV layout is fixed: ``t``, then the density-matrix elements row-major with
interleaved real and imaginary parts, then per-channel decay rates, then
per-entry occupation counts.  Floats are written with Python's shortest
round-trip repr, so ``read_csv(write_csv(s))`` reproduces every value bit for
bit and a seeded rerun produces byte-identical files.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import GridMismatch


@dataclass
class TrajectorySeries:
    times: np.ndarray
    rho: np.ndarray  # (T, d, d) complex
    rates: np.ndarray  # (T, n_channels) float
    counts: np.ndarray  # (T, n_entries) int; empty for oracle series
    events: list = field(default_factory=list)
    basis_labels: tuple[str, ...] = ()

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.rho = np.asarray(self.rho, dtype=complex)
        if self.rates is None or np.size(self.rates) == 0:
            self.rates = np.zeros((len(self.times), 0))
        self.rates = np.atleast_2d(np.asarray(self.rates, dtype=float))
        if self.counts is None or np.size(self.counts) == 0:
            self.counts = np.zeros((len(self.times), 0), dtype=np.int64)
        self.counts = np.atleast_2d(np.asarray(self.counts, dtype=np.int64))
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("time grid must be strictly increasing")
        t = len(self.times)
        if self.rho.shape[0] != t or self.rho.shape[1] != self.rho.shape[2]:
            raise ValueError(f"rho shape {self.rho.shape} inconsistent with grid")

    @property
    def dim(self) -> int:
        return self.rho.shape[1]

    def population(self, i: int) -> np.ndarray:
        return self.rho[:, i, i].real

    def coherence_magnitude(self, i: int, j: int) -> np.ndarray:
        return np.abs(self.rho[:, i, j])


def _fmt(x: float) -> str:
    return repr(float(x))


def csv_header(dim: int, n_channels: int, n_entries: int) -> list[str]:
    cols = ["t"]
    for i in range(dim):
        for j in range(dim):
            cols.append(f"rho_{i}{j}_re")
            cols.append(f"rho_{i}{j}_im")
    cols.extend(f"delta_{j + 1}" for j in range(n_channels))
    cols.extend(f"n_{k}" for k in range(n_entries))
    return cols


def write_csv(series: TrajectorySeries, path: str | Path) -> Path:
    path = Path(path)
    d = series.dim
    n_ch = series.rates.shape[1]
    n_en = series.counts.shape[1]
    lines = [",".join(csv_header(d, n_ch, n_en))]
    for k in range(len(series.times)):
        row = [_fmt(series.times[k])]
        for i in range(d):
            for j in range(d):
                row.append(_fmt(series.rho[k, i, j].real))
                row.append(_fmt(series.rho[k, i, j].imag))
        row.extend(_fmt(series.rates[k, j]) for j in range(n_ch))
        row.extend(str(int(series.counts[k, m])) for m in range(n_en))
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path: str | Path) -> TrajectorySeries:
    path = Path(path)
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    n_rho = sum(1 for c in header if c.startswith("rho_"))
    d = int(round(np.sqrt(n_rho / 2)))
    if 2 * d * d != n_rho:
        raise ValueError(f"{path}: malformed rho columns")
    n_ch = sum(1 for c in header if c.startswith("delta_"))
    n_en = sum(1 for c in header if c.startswith("n_"))
    expected = csv_header(d, n_ch, n_en)
    if header != expected:
        raise ValueError(f"{path}: unexpected column layout")
    t_count = len(lines) - 1
    times = np.empty(t_count)
    rho = np.empty((t_count, d, d), dtype=complex)
    rates = np.empty((t_count, n_ch))
    counts = np.empty((t_count, n_en), dtype=np.int64)
    for k, line in enumerate(lines[1:]):
        vals = line.split(",")
        times[k] = float(vals[0])
        pos = 1
        for i in range(d):
            for j in range(d):
                rho[k, i, j] = complex(float(vals[pos]), float(vals[pos + 1]))
                pos += 2
        for j in range(n_ch):
            rates[k, j] = float(vals[pos])
            pos += 1
        for m in range(n_en):
            counts[k, m] = int(vals[pos])
            pos += 1
    return TrajectorySeries(times=times, rho=rho, rates=rates, counts=counts)


def write_series_json(series: TrajectorySeries, path: str | Path) -> Path:
    path = Path(path)
    payload = {
        "times": series.times.tolist(),
        "rho_re": series.rho.real.tolist(),
        "rho_im": series.rho.imag.tolist(),
        "rates": series.rates.tolist(),
        "counts": series.counts.tolist(),
        "basis_labels": list(series.basis_labels),
    }
    path.write_text(json.dumps(payload))
    return path


def write_events_ndjson(events, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w") as fh:
        for e in events:
            fh.write(json.dumps(dataclasses.asdict(e)) + "\n")
    return path


def read_events_ndjson(path: str | Path) -> list[dict]:
    return [json.loads(line) for line in Path(path).read_text().splitlines() if line]


@dataclass
class ComparisonReport:
    max_deviation: float
    per_element: dict[str, float]
    tolerance: float
    passed: bool

    def summary_dict(self) -> dict:
        return {
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "per_element": self.per_element,
        }


def compare_series(
    a: TrajectorySeries, b: TrajectorySeries, tol: float
) -> ComparisonReport:
    """Elementwise maximum deviation between two series on identical grids.

    Populations (diagonal) are compared directly; coherences by magnitude,
    since global Lamb-shift phase conventions may differ between sources.
    """
    if a.dim != b.dim:
        raise GridMismatch(f"dimension mismatch: {a.dim} != {b.dim}")
    if len(a.times) != len(b.times) or not np.allclose(
        a.times, b.times, rtol=0, atol=1e-12
    ):
        raise GridMismatch("time grids differ")
    per: dict[str, float] = {}
    for i in range(a.dim):
        for j in range(a.dim):
            if i == j:
                dev = np.max(np.abs(a.rho[:, i, i].real - b.rho[:, i, i].real))
            elif i < j:
                dev = np.max(np.abs(np.abs(a.rho[:, i, j]) - np.abs(b.rho[:, i, j])))
            else:
                continue
            per[f"rho_{i}{j}"] = float(dev)
    max_dev = max(per.values())
    return ComparisonReport(
        max_deviation=max_dev, per_element=per, tolerance=tol, passed=max_dev < tol
    )
