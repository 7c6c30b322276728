"""Two-way message exchange simulator.

Node B sends at T1 (B clock), node A receives at T2 and replies at T3
(A clock), node B receives at T4 (B clock). Propagation adds a fixed delay d
plus a zero-mean random delay in the sender's local time base, so the uplink
noise reaches A's timestamps scaled by the skew. The reply wait b is constant,
which keeps the noise-free timestamp matrix exactly rank two.
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .clock_model import ClockParams

_DISTRIBUTIONS = ("gaussian", "exponential")


@dataclass(frozen=True)
class DelayModel:
    """Fixed one-way delay d, reply wait b, and the random-delay distribution.

    Gaussian is the estimation model; the exponential option (shifted to mean
    zero, same variance) exists only for robustness probing.
    """

    fixed_delay: float
    processing_delay: float = 0.0
    noise_std: float = 0.0
    distribution: str = "gaussian"

    def __post_init__(self):
        if self.fixed_delay < 0:
            raise ValueError(f"fixed_delay must be >= 0, got {self.fixed_delay}")
        if self.processing_delay < 0:
            raise ValueError(f"processing_delay must be >= 0, got {self.processing_delay}")
        if self.noise_std < 0:
            raise ValueError(f"noise_std must be >= 0, got {self.noise_std}")
        if self.distribution not in _DISTRIBUTIONS:
            raise ValueError(f"distribution must be one of {_DISTRIBUTIONS}")


@dataclass(frozen=True)
class SchedulePlan:
    """Send schedule on node B's clock: N rounds at a constant interval."""

    rounds: int
    start_time: float = 0.0
    inter_round_interval: float = 1.0

    def __post_init__(self):
        # fewer than 2 rounds leave the 3-parameter solve underdetermined
        if self.rounds < 2:
            raise ValueError(f"rounds must be >= 2, got {self.rounds}")
        if not self.inter_round_interval > 0:
            raise ValueError("inter_round_interval must be positive")

    def send_times(self) -> np.ndarray:
        return self.start_time + np.arange(self.rounds, dtype=np.float64) * self.inter_round_interval


@dataclass(frozen=True)
class ExchangeLog:
    """N rounds of (t1, t2, t3, t4) plus the ground truth that generated them."""

    rows: np.ndarray
    truth_params: ClockParams
    truth_delays: DelayModel
    plan: SchedulePlan
    seed: int

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] != 4:
            raise ValueError(f"rows must be N x 4, got shape {rows.shape}")
        if np.any(rows[:, 2] < rows[:, 1]):
            raise ValueError("reply time t3 precedes reception t2 in some round")
        if np.any(np.diff(rows[:, 0]) <= 0):
            raise ValueError("send times t1 must be strictly increasing")
        object.__setattr__(self, "rows", rows)

    @property
    def rounds(self) -> int:
        return self.rows.shape[0]


def _draw_delays(rng, model: DelayModel, n: int) -> np.ndarray:
    if model.distribution == "gaussian":
        return rng.normal(0.0, model.noise_std, n)
    # shifted exponential: rate 1/sigma gives variance sigma^2, minus sigma
    # centers it at zero
    return rng.exponential(model.noise_std, n) - model.noise_std


def simulate_cycle(
    params: ClockParams, delays: DelayModel, plan: SchedulePlan, seed: int
) -> ExchangeLog:
    """Run one synchronization cycle of N two-way exchanges.

    Deterministic given the seed: the uplink delays X are drawn first, then
    the downlink delays Y.
    """
    rng = np.random.default_rng(seed)
    x = _draw_delays(rng, delays, plan.rounds)
    y = _draw_delays(rng, delays, plan.rounds)
    rows = _kernels.forward_matrix(
        plan.send_times(),
        params.skew,
        params.offset,
        delays.fixed_delay,
        delays.processing_delay,
        x,
        y,
    )
    return ExchangeLog(rows, params, delays, plan, seed)


def empirical_delay_moments(log: ExchangeLog) -> tuple[float, float]:
    """Sample mean and variance of the realized random delays.

    Inverts the forward model with the true parameters, pooling uplink and
    downlink draws. Diagnostic for the i.i.d. zero-mean assumption.
    """
    alpha = log.truth_params.skew
    beta = log.truth_params.offset
    d = log.truth_delays.fixed_delay
    x = (log.rows[:, 1] - beta) / alpha - log.rows[:, 0] - d
    y = log.rows[:, 3] - (log.rows[:, 2] - beta) / alpha - d
    pooled = np.concatenate([x, y])
    ddof = 1 if pooled.size > 1 else 0
    return float(pooled.mean()), float(pooled.var(ddof=ddof))


def write_exchange_csv(log: ExchangeLog, path) -> None:
    """Write the timestamp rows as CSV plus a JSON sidecar with the truth."""
    path = Path(path)
    write_rows_csv(log.rows, path)
    sidecar = {
        "skew": log.truth_params.skew,
        "offset": log.truth_params.offset,
        "fixed_delay": log.truth_delays.fixed_delay,
        "processing_delay": log.truth_delays.processing_delay,
        "noise_std": log.truth_delays.noise_std,
        "distribution": log.truth_delays.distribution,
        "rounds": log.plan.rounds,
        "start_time": log.plan.start_time,
        "inter_round_interval": log.plan.inter_round_interval,
        "seed": log.seed,
    }
    Path(f"{path}.json").write_text(json.dumps(sidecar, indent=2) + "\n")


def write_rows_csv(rows: np.ndarray, path) -> None:
    """CSV with header round,t1,t2,t3,t4 at full double precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["round", "t1", "t2", "t3", "t4"])
        for i, row in enumerate(np.asarray(rows), start=1):
            writer.writerow([i] + [f"{v:.17g}" for v in row])


def read_rows_csv(path) -> np.ndarray:
    """Read a timestamp CSV written by write_rows_csv back into an N x 4 array."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["round", "t1", "t2", "t3", "t4"]:
            raise ValueError(f"unexpected CSV header in {path}: {header}")
        data = [[float(v) for v in line[1:5]] for line in reader if line]
    if not data:
        raise ValueError(f"no timestamp rows in {path}")
    return np.asarray(data, dtype=np.float64)
