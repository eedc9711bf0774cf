"""Stochastic unraveling engine with forward and reverse quantum jumps.

The ensemble of N pure-state trajectories is stored as a registry of
physically distinct states with integer occupation counts (one copy per
state, deduplicated up to global phase).  Each step:

1. branch probabilities are evaluated with all counts frozen at the step
   start: forward (positive-rate) channels follow the standard Monte Carlo
   wave-function prescription, while negative-rate channels move members
   *onto* an existing registry state, with probability proportional to the
   target's count;
2. the number of members taking each branch is drawn from the exact
   multinomial for every registry entry, using one seeded stream per entry
   (stream index = insertion order), so runs are reproducible regardless of
   scheduling;
3. all count transfers are applied atomically, every registry state is
   advanced by the first-order non-Hermitian step and renormalized, the
   reverse-jump connectivity is rebuilt from scratch by state identity, and
   coinciding entries are merged.

Entries whose count reaches zero are kept and keep evolving (their
reverse-jump weight is zero, which is exactly the memory-loss regime); the
step records when that happens on a still-negative channel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import SourceEmpty, StepTooLarge
from .models import ModelSpec, lamb_shift_hamiltonian, master_rhs

# Registry deduplication tolerance for "same state up to global phase".
DEDUP_TOL = 1e-9

FORWARD = "forward"
REVERSE = "reverse"


@dataclass(frozen=True)
class EngineConfig:
    dt: float = 0.01
    t_max: float = 6.0
    ensemble_size: int = 100_000
    rng_seed: int = 0
    record_stride: int = 10
    max_jump_prob: float = 0.1

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_max <= 0:
            raise ValueError("t_max must be positive")
        if self.ensemble_size < 1:
            raise ValueError("ensemble_size must be >= 1")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be a non-negative integer")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")
        if not 0 < self.max_jump_prob <= 1:
            raise ValueError("max_jump_prob must be in (0, 1]")
        if abs(round(self.t_max / self.dt) * self.dt - self.t_max) > 1e-9:
            raise ValueError("t_max must be an integer multiple of dt")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))


@dataclass(frozen=True)
class JumpEvent:
    """Aggregated jump record: members_moved members took one branch."""

    step_index: int
    time: float
    channel: int
    direction: str
    source_entry: int
    target_entry: int
    members_moved: int


@dataclass
class StepOutcome:
    events: list[JumpEvent]
    counts_after: np.ndarray
    memory_loss_entries: tuple[int, ...] = ()
    created_entries: tuple[int, ...] = ()


def entry_stream(master_seed: int, index: int) -> np.random.Generator:
    """Seeded per-entry stream; index is the registry insertion order."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


@dataclass
class RegistryEntry:
    state: np.ndarray
    count: int
    rng: np.random.Generator
    merged_into: int | None = None

    @property
    def alive(self) -> bool:
        return self.merged_into is None

    @property
    def active(self) -> bool:
        return self.alive and self.count > 0


class EnsembleRegistry:
    """States, integer counts and the reverse-jump connectivity map.

    ``connectivity[(channel_label, source_index)]`` lists every entry
    (insertion order) whose image under that channel's jump operator is the
    source entry's state: the legal reverse-jump targets.  Multiple targets
    are possible (cascade schemes) and are treated as mutually exclusive
    branches of one draw.
    """

    def __init__(self, model: ModelSpec, ensemble_size: int, rng_seed: int):
        self.model = model
        self.total = int(ensemble_size)
        self.rng_seed = int(rng_seed)
        self.entries: list[RegistryEntry] = [
            RegistryEntry(
                state=linalg.normalize(model.initial_state),
                count=self.total,
                rng=entry_stream(self.rng_seed, 0),
            )
        ]
        self.connectivity: dict[tuple[int, int], tuple[int, ...]] = {}
        self.rebuild_connectivity()

    # -- bookkeeping -------------------------------------------------------

    def counts(self) -> np.ndarray:
        return np.array([e.count for e in self.entries], dtype=np.int64)

    def n_eff(self) -> int:
        return sum(1 for e in self.entries if e.active)

    def check_conservation(self):
        s = int(sum(e.count for e in self.entries))
        if s != self.total:
            raise AssertionError(f"count conservation violated: {s} != {self.total}")

    def find_matching(self, state: np.ndarray) -> int | None:
        for i, e in enumerate(self.entries):
            if e.alive and linalg.phase_equal(e.state, state, DEDUP_TOL):
                return i
        return None

    def add_entry(self, state: np.ndarray) -> int:
        idx = len(self.entries)
        self.entries.append(
            RegistryEntry(state=state, count=0, rng=entry_stream(self.rng_seed, idx))
        )
        return idx

    def rebuild_connectivity(self):
        conn: dict[tuple[int, int], list[int]] = {}
        alive = [(i, e) for i, e in enumerate(self.entries) if e.alive]
        for ch in self.model.channels:
            for bi, be in alive:  # candidate reverse-jump target
                y = ch.jump_op @ be.state
                n = np.linalg.norm(y)
                if n <= 1e-12:
                    continue
                yn = y / n
                for ai, ae in alive:
                    if linalg.phase_equal(ae.state, yn, DEDUP_TOL):
                        conn.setdefault((ch.label, ai), []).append(bi)
                        break
        self.connectivity = {k: tuple(v) for k, v in conn.items()}

    def merge_duplicates(self) -> bool:
        """Fold together alive entries that became phase-equal; True if any."""
        merged = False
        alive = [i for i, e in enumerate(self.entries) if e.alive]
        for pos, i in enumerate(alive):
            if not self.entries[i].alive:
                continue
            for k in alive[pos + 1 :]:
                ek = self.entries[k]
                if ek.alive and linalg.phase_equal(
                    self.entries[i].state, ek.state, DEDUP_TOL
                ):
                    self.entries[i].count += ek.count
                    ek.count = 0
                    ek.merged_into = i
                    merged = True
        return merged


# -- single operations -----------------------------------------------------


def step_matrix(model: ModelSpec, delta_rates, lam_rates, dt: float) -> np.ndarray:
    """First-order propagator 1 - i dt H with the signed non-Hermitian H."""
    h = lamb_shift_hamiltonian(model, lam_rates)
    m = np.eye(model.dim, dtype=complex) - 1j * dt * h
    for ch, dj in zip(model.channels, delta_rates):
        m -= 0.5 * dt * dj * (ch.jump_op.conj().T @ ch.jump_op)
    return m


def deterministic_step(v: np.ndarray, t: float, model: ModelSpec, dt: float) -> np.ndarray:
    """No-jump evolution over one step, renormalized."""
    m = step_matrix(model, model.decay_rates(t), model.lamb_shift_rates(t), dt)
    return linalg.normalize(m @ v)


def positive_jump_probability(
    v: np.ndarray, channel, t: float, dt: float, max_jump_prob: float = 0.1
) -> float:
    """Forward-jump probability rate * dt * <v|C^dag C|v> for a positive channel."""
    rate = float(channel.rate.decay_rate(t))
    if rate < 0:
        raise ValueError("positive_jump_probability requires a non-negative rate")
    p = rate * dt * float(np.linalg.norm(channel.jump_op @ v) ** 2)
    if p > max_jump_prob:
        raise StepTooLarge(
            f"forward jump probability {p:.3g} exceeds guard {max_jump_prob}; shrink dt"
        )
    return p


def reverse_jump_probability(
    reg: EnsembleRegistry,
    source: int,
    target: int,
    channel,
    t: float,
    dt: float,
    max_jump_prob: float = 0.1,
) -> float:
    """Reverse-jump probability (N_target / N_source) |rate| dt <target|C^dag C|target>.

    Zero when the target entry is empty (the ensemble has lost that memory).
    The step-size guard applies to the physical part |rate| dt <C^dag C>; the
    count ratio is ensemble bookkeeping, not a discretization quantity.
    """
    n_src = reg.entries[source].count
    if n_src == 0:
        raise SourceEmpty(f"entry {source} holds no members")
    n_tgt = reg.entries[target].count
    if n_tgt == 0:
        return 0.0
    rate = float(channel.rate.decay_rate(t))
    w = abs(rate) * dt * float(
        np.linalg.norm(channel.jump_op @ reg.entries[target].state) ** 2
    )
    if w > max_jump_prob:
        raise StepTooLarge(
            f"reverse jump rate term {w:.3g} exceeds guard {max_jump_prob}; shrink dt"
        )
    return (n_tgt / n_src) * w


def density_matrix(reg: EnsembleRegistry) -> np.ndarray:
    """sum_alpha (N_alpha / N) |psi_alpha><psi_alpha|; trace is exactly 1."""
    rho = np.zeros((reg.model.dim, reg.model.dim), dtype=complex)
    for e in reg.entries:
        if e.count:
            rho += (e.count / reg.total) * linalg.outer(e.state)
    return rho


# -- one full step -----------------------------------------------------------


def _branches(reg, entry_idx, delta_rates, dt, max_jump_prob):
    """Branch list for one source entry, counts frozen, in canonical order.

    Forward branches come first ordered by channel label, then reverse
    branches ordered by (channel label, target insertion index); each item is
    (direction, channel_index, target_index_or_None, probability).
    """
    model = reg.model
    entry = reg.entries[entry_idx]
    out = []
    for jidx, ch in enumerate(model.channels):
        dj = delta_rates[jidx]
        if dj <= 0:
            continue
        p = dj * dt * float(np.linalg.norm(ch.jump_op @ entry.state) ** 2)
        if p > max_jump_prob:
            raise StepTooLarge(
                f"forward jump probability {p:.3g} on channel {ch.label} "
                f"exceeds guard {max_jump_prob}; shrink dt"
            )
        if p > 0.0:
            out.append((FORWARD, jidx, None, p))
    for jidx, ch in enumerate(model.channels):
        dj = delta_rates[jidx]
        if dj >= 0:
            continue
        for bi in reg.connectivity.get((ch.label, entry_idx), ()):
            tgt = reg.entries[bi]
            if tgt.count == 0:
                continue  # no members in the target state: probability zero
            w = abs(dj) * dt * float(np.linalg.norm(ch.jump_op @ tgt.state) ** 2)
            if w > max_jump_prob:
                raise StepTooLarge(
                    f"reverse jump rate term {w:.3g} on channel {ch.label} "
                    f"exceeds guard {max_jump_prob}; shrink dt"
                )
            p = (tgt.count / entry.count) * w
            if p > 0.0:
                out.append((REVERSE, jidx, bi, p))
    return out


def advance_step(
    reg: EnsembleRegistry,
    t: float,
    model: ModelSpec,
    cfg: EngineConfig,
    step_index: int = 0,
    delta_rates: np.ndarray | None = None,
    lam_rates: np.ndarray | None = None,
) -> StepOutcome:
    """Advance the whole registry from t to t + dt."""
    if delta_rates is None:
        delta_rates = np.asarray(model.decay_rates(t), dtype=float)
    if lam_rates is None:
        lam_rates = np.asarray(model.lamb_shift_rates(t), dtype=float)
    dt = cfg.dt

    # 1. sample branch counts with all entry counts frozen
    start_counts = [e.count for e in reg.entries]
    sampled: list[tuple[int, tuple, int]] = []  # (source_idx, branch, movers)
    for ai in range(len(reg.entries)):
        entry = reg.entries[ai]
        if not entry.active:
            continue
        branches = _branches(reg, ai, delta_rates, dt, cfg.max_jump_prob)
        if not branches:
            continue
        probs = [b[3] for b in branches]
        s = sum(probs)
        if s >= 1.0:
            # Source exhaustion: every member jumps, branch chosen
            # proportionally.  Only reachable through the count ratio of
            # reverse jumps while the source empties out.
            pvals = [p / s for p in probs] + [0.0]
        else:
            pvals = probs + [1.0 - s]
        draw = entry.rng.multinomial(entry.count, pvals)
        for b, n in zip(branches, draw[:-1]):
            if n:
                sampled.append((ai, b, int(n)))

    # 2. apply all transfers atomically (branch resolution may add entries)
    events = []
    created = []
    for ai, (direction, jidx, bi, _p), n in sampled:
        ch = model.channels[jidx]
        if direction == FORWARD:
            target_state = linalg.normalize(ch.jump_op @ reg.entries[ai].state)
            ti = reg.find_matching(target_state)
            if ti is None:
                ti = reg.add_entry(target_state)
                created.append(ti)
        else:
            ti = bi
        reg.entries[ai].count -= n
        reg.entries[ti].count += n
        events.append(
            JumpEvent(step_index, float(t), ch.label, direction, ai, ti, n)
        )

    # 3. record sources that emptied while one of their reverse channels is
    # still negative: the ensemble has lost the corresponding memory
    memory_loss = []
    for ai, e in enumerate(reg.entries):
        if ai < len(start_counts) and start_counts[ai] > 0 and e.count == 0:
            for jidx, ch in enumerate(model.channels):
                if delta_rates[jidx] < 0 and (ch.label, ai) in reg.connectivity:
                    memory_loss.append(ai)
                    break

    # 4. deterministic evolution of every state, zero-count entries included
    m = step_matrix(model, delta_rates, lam_rates, dt)
    for e in reg.entries:
        if e.alive:
            e.state = linalg.normalize(m @ e.state)

    # 5. connectivity reflects the new states; merge any collisions
    reg.merge_duplicates()
    reg.rebuild_connectivity()
    reg.check_conservation()

    return StepOutcome(
        events=events,
        counts_after=reg.counts(),
        memory_loss_entries=tuple(memory_loss),
        created_entries=tuple(created),
    )


def one_step_average_check(
    reg: EnsembleRegistry, t: float, model: ModelSpec, dt: float
) -> float:
    """Residual of the exact one-step expectation against the master equation.

    Averages the engine step analytically (branch probabilities instead of
    sampling; states evolve deterministically, so the expectation is exact)
    and returns ||sigma(t+dt) - rho(t) - dt * L(rho(t))||_max.  Second-order
    in dt when the algorithm and the master equation agree.
    """
    delta_rates = np.asarray(model.decay_rates(t), dtype=float)
    lam_rates = np.asarray(model.lamb_shift_rates(t), dtype=float)
    rho = density_matrix(reg)
    m = step_matrix(model, delta_rates, lam_rates, dt)

    sigma = np.zeros_like(rho)
    for ai, entry in enumerate(reg.entries):
        if not entry.active:
            continue
        w = entry.count / reg.total
        branches = _branches(reg, ai, delta_rates, dt, max_jump_prob=1.0)
        p_tot = sum(b[3] for b in branches)
        sigma += w * (1.0 - p_tot) * linalg.outer(linalg.normalize(m @ entry.state))
        for direction, jidx, bi, p in branches:
            ch = model.channels[jidx]
            if direction == FORWARD:
                y = linalg.normalize(ch.jump_op @ entry.state)
            else:
                y = reg.entries[bi].state
            sigma += w * p * linalg.outer(linalg.normalize(m @ y))

    target = rho + dt * master_rhs(model, rho, t, delta_rates, lam_rates)
    return float(np.max(np.abs(sigma - target)))


# -- full runs ---------------------------------------------------------------


@dataclass
class SimulationResult:
    times: np.ndarray
    rho: np.ndarray  # (T, d, d)
    rates: np.ndarray  # (T, n_channels)
    counts: np.ndarray  # (T, n_entries) padded with zeros before creation
    events: list[JumpEvent]
    registry: EnsembleRegistry
    memory_loss: list[tuple[float, int]] = field(default_factory=list)
    grew_during_all_negative: bool = False

    def n_eff(self) -> np.ndarray:
        return (self.counts > 0).sum(axis=1)


def run_simulation(model: ModelSpec, cfg: EngineConfig) -> SimulationResult:
    """Run the unraveling over [0, t_max] and record on the stride grid."""
    n_steps = cfg.n_steps
    grid = np.arange(n_steps + 1) * cfg.dt

    # rates are deterministic in t: precompute once on the step grid
    delta_grid = np.stack([ch.rate.decay_rate(grid) for ch in model.channels], axis=1)
    lam_grid = np.stack(
        [ch.rate.lamb_shift_rate(grid) for ch in model.channels], axis=1
    )

    reg = EnsembleRegistry(model, cfg.ensemble_size, cfg.rng_seed)

    rec_times = []
    rec_rho = []
    rec_rates = []
    rec_counts = []
    events: list[JumpEvent] = []
    memory_loss: list[tuple[float, int]] = []
    grew_during_negative = False

    def record(k: int):
        rec_times.append(grid[k])
        rec_rho.append(density_matrix(reg))
        rec_rates.append(delta_grid[k])
        rec_counts.append(reg.counts())

    record(0)
    for k in range(n_steps):
        outcome = advance_step(
            reg, grid[k], model, cfg, step_index=k,
            delta_rates=delta_grid[k], lam_rates=lam_grid[k],
        )
        events.extend(outcome.events)
        for ai in outcome.memory_loss_entries:
            memory_loss.append((float(grid[k]), ai))
        if outcome.created_entries and np.all(delta_grid[k] < 0):
            grew_during_negative = True
        if (k + 1) % cfg.record_stride == 0 or (k + 1) == n_steps:
            record(k + 1)

    n_entries = len(reg.entries)
    counts = np.zeros((len(rec_counts), n_entries), dtype=np.int64)
    for i, row in enumerate(rec_counts):
        counts[i, : len(row)] = row

    return SimulationResult(
        times=np.array(rec_times),
        rho=np.array(rec_rho),
        rates=np.array(rec_rates),
        counts=counts,
        events=events,
        registry=reg,
        memory_loss=memory_loss,
        grew_during_all_negative=grew_during_negative,
    )
