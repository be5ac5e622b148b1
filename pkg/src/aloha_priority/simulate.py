"""Slot-by-slot Monte Carlo simulation of the two-queue system.

A run drives :func:`aloha_priority.model.advance_slot` with pre-drawn coins
from four independent generator streams (queue-1 arrivals, queue-2 arrivals,
queue-1 access, queue-2 access), all spawned deterministically from the
config seed.  Separate streams mean that two configs differing only in the
dominance mode consume identical coin sequences, which makes the pathwise
dominance of the saturated systems directly observable in tests: slot for
slot, a dominant system's queues are at least as long as the original's.

Every reported statistic is computed over the post-warmup window.  Standard
errors come from batch means (100 batches) rather than the naive iid formula
because successive slots are strongly correlated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import (
    AccessProbabilities,
    ArrivalRates,
    DominanceMode,
    Phase,
    ProtocolKind,
    SlotOutcome,
    SystemState,
    advance_slot,
)

STABLE = "stable"
UNSTABLE = "unstable"
INCONCLUSIVE = "inconclusive"

# default seed for CLI runs and packaged verification checks
DEFAULT_SEED = 24301

_N_BATCHES = 100
# classify_stability needs at least this many post-warmup samples to commit
_MIN_SAMPLES = 10_000


@dataclass(frozen=True)
class StabilityThresholds:
    """Decision thresholds for the drift-based stability verdict.

    Stable needs a flat trajectory and a final length that is small relative
    to the run length; unstable needs clear positive drift.  Anything in
    between stays inconclusive.
    """

    stable_slope: float = 1e-3
    unstable_slope: float = 5e-3
    final_fraction: float = 0.01


@dataclass(frozen=True)
class SimulationConfig:
    kind: ProtocolKind
    mode: DominanceMode
    p: AccessProbabilities
    l: ArrivalRates
    horizon: int
    seed: int
    warmup: int | None = None
    thresholds: StabilityThresholds = field(default_factory=StabilityThresholds)

    def __post_init__(self) -> None:
        if self.horizon < 2:
            raise ValueError("horizon must be at least 2 slots")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.warmup is None:
            # 1% of the horizon, at least 10^4 slots, but always leaving at
            # least half the run for measurement on short horizons
            resolved = min(max(self.horizon // 100, 10_000), self.horizon // 2)
            object.__setattr__(self, "warmup", resolved)
        if not 0 <= self.warmup < self.horizon:
            raise ValueError("warmup must satisfy 0 <= warmup < horizon")


@dataclass(frozen=True)
class Trajectory:
    """Per-slot record of one run; lengths and phases are end-of-slot values."""

    q1: np.ndarray
    q2: np.ndarray
    phase_start: np.ndarray
    outcome: np.ndarray
    busy1: np.ndarray
    busy2: np.ndarray


@dataclass(frozen=True)
class SimulationMetrics:
    """Post-warmup statistics of one run.

    ``delivered`` counts successful transmissions, including dummy successes
    of saturated queues; ``empirical_mu`` normalises by every post-warmup
    slot for a saturated queue and by busy slots (packet present at access
    time) otherwise.  ``drift`` is the least-squares slope of the end-of-slot
    queue length, in packets per slot.
    """

    delivered: tuple[int, int]
    busy_slots: tuple[int, int]
    empirical_mu: tuple[float, float]
    mu_stderr: tuple[float, float]
    backoff_occupancy: float
    occupancy_stderr: float
    mean_len: tuple[float, float]
    final_len: tuple[int, int]
    drift: tuple[float, float]
    verdict: tuple[str, str]


def _batch_rate(values: np.ndarray, base: np.ndarray | None = None) -> tuple[float, float]:
    """Overall rate of ``values`` (per slot, or per base slot) and its batch SE."""
    n = values.shape[0]
    m = n // _N_BATCHES
    if base is None:
        rate = float(values.mean()) if n else float("nan")
        if m == 0:
            return rate, float("nan")
        batch = values[: _N_BATCHES * m].reshape(_N_BATCHES, m).mean(axis=1)
        return rate, float(batch.std(ddof=1) / _N_BATCHES**0.5)
    total_base = int(base.sum())
    rate = float(values.sum() / total_base) if total_base else float("nan")
    if m == 0:
        return rate, float("nan")
    v = values[: _N_BATCHES * m].reshape(_N_BATCHES, m).sum(axis=1)
    b = base[: _N_BATCHES * m].reshape(_N_BATCHES, m).sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = v / b
    ratios = ratios[np.isfinite(ratios)]
    if ratios.shape[0] < 2:
        return rate, float("nan")
    return rate, float(ratios.std(ddof=1) / ratios.shape[0] ** 0.5)


def classify_stability(
    lengths: np.ndarray,
    thresholds: StabilityThresholds,
    total_slots: int | None = None,
) -> str:
    """Drift-based verdict on one queue's post-warmup length trajectory.

    Fewer than 10^4 samples is treated as inconclusive outright; no verdict
    from a short window is worth reporting.
    """
    n = lengths.shape[0]
    if n < _MIN_SAMPLES:
        return INCONCLUSIVE
    slope = float(np.polyfit(np.arange(n, dtype=np.float64), lengths, 1)[0])
    total = total_slots if total_slots is not None else n
    if abs(slope) < thresholds.stable_slope and lengths[-1] < thresholds.final_fraction * total:
        return STABLE
    if slope > thresholds.unstable_slope:
        return UNSTABLE
    return INCONCLUSIVE


def run_trajectory(config: SimulationConfig) -> Trajectory:
    """Simulate the full horizon from an empty initial state."""
    n = config.horizon
    streams = [
        np.random.default_rng(child)
        for child in np.random.SeedSequence(config.seed).spawn(4)
    ]
    arr1 = (streams[0].random(n) < config.l.l1).tolist()
    arr2 = (streams[1].random(n) < config.l.l2).tolist()
    acc1 = (streams[2].random(n) < config.p.p1).tolist()
    acc2 = (streams[3].random(n) < config.p.p2).tolist()

    q1 = np.empty(n, dtype=np.int64)
    q2 = np.empty(n, dtype=np.int64)
    phase_start = np.empty(n, dtype=np.int8)
    outcome = np.empty(n, dtype=np.int8)

    state = SystemState(0, 0, Phase.NORMAL)
    kind, mode, p = config.kind, config.mode, config.p
    for t in range(n):
        phase_start[t] = int(state.phase)
        state, out = advance_slot(
            state, kind, mode, p, (arr1[t], arr2[t]), (acc1[t], acc2[t])
        )
        q1[t] = state.q1_len
        q2[t] = state.q2_len
        outcome[t] = int(out)

    arr1 = np.asarray(arr1)
    arr2 = np.asarray(arr2)
    busy1 = np.concatenate(([0], q1[:-1])) + arr1 > 0
    busy2 = np.concatenate(([0], q2[:-1])) + arr2 > 0
    return Trajectory(
        q1=q1, q2=q2, phase_start=phase_start, outcome=outcome, busy1=busy1, busy2=busy2
    )


def summarize(trajectory: Trajectory, config: SimulationConfig) -> SimulationMetrics:
    w = config.warmup
    q1 = trajectory.q1[w:]
    q2 = trajectory.q2[w:]
    out = trajectory.outcome[w:]
    busy1 = trajectory.busy1[w:]
    busy2 = trajectory.busy2[w:]

    success1 = (out == int(SlotOutcome.SUCCESS_Q1)) | (
        out == int(SlotOutcome.PRIORITY_RETRANSMISSION)
    )
    success2 = out == int(SlotOutcome.SUCCESS_Q2)
    forced1 = config.mode in (DominanceMode.DS2, DominanceMode.DS3)
    forced2 = config.mode in (DominanceMode.DS1, DominanceMode.DS3)

    mu1, se1 = _batch_rate(success1, None if forced1 else busy1)
    mu2, se2 = _batch_rate(success2, None if forced2 else busy2)
    occ, occ_se = _batch_rate(trajectory.phase_start[w:].astype(np.float64))

    def _slope(lengths: np.ndarray) -> float:
        if lengths.shape[0] < 2:
            return float("nan")
        x = np.arange(lengths.shape[0], dtype=np.float64)
        return float(np.polyfit(x, lengths, 1)[0])

    return SimulationMetrics(
        delivered=(int(success1.sum()), int(success2.sum())),
        busy_slots=(int(busy1.sum()), int(busy2.sum())),
        empirical_mu=(mu1, mu2),
        mu_stderr=(se1, se2),
        backoff_occupancy=occ,
        occupancy_stderr=occ_se,
        mean_len=(float(q1.mean()), float(q2.mean())),
        final_len=(int(q1[-1]), int(q2[-1])),
        drift=(_slope(q1), _slope(q2)),
        verdict=(
            classify_stability(q1, config.thresholds, config.horizon),
            classify_stability(q2, config.thresholds, config.horizon),
        ),
    )


def run(config: SimulationConfig) -> SimulationMetrics:
    """Simulate and summarise; deterministic in (config, seed)."""
    return summarize(run_trajectory(config), config)
