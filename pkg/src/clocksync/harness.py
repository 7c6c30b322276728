"""Monte Carlo experiment driver.

Sweeps the number of rounds N over a grid, runs M independent trials per grid
point (each trial redraws the clock parameters, simulates a cycle, estimates
with and without denoising), and aggregates mean squared errors against the
variance bounds. Child RNG streams derive from (master_seed, n, trial_index)
by counter-based splitting, so changing the trial count or the grid never
perturbs earlier trials and runs are bit-reproducible.

The wall_time_ms column of results.csv is a fixed 0.0 placeholder: emitted
results must be byte-identical across runs, which real timings would break.
Measured timings go to the run_meta.json sidecar instead.
"""

import json
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import _kernels
from ._backend import get_backend

_ALL_METHODS = ("MLE_RAW", "MLE_SVD", "MLE_LRMA")
_DEFAULT_RANGES = {"alpha": (0.99, 1.01), "beta": (-10.0, 10.0), "d": (1.0, 10.0)}

# column layout of the per-trial kernel output
_ERR_COLS = {"MLE_RAW": (0, 1), "MLE_SVD": (2, 3), "MLE_LRMA": (4, 5)}
_CRLB_A, _CRLB_B, _CRLB_A_HAT, _CRLB_B_HAT, _STATUS = 6, 7, 8, 9, 10


@dataclass(frozen=True)
class ExperimentConfig:
    """Protocol settings for one experiment sweep."""

    n_rounds_grid: tuple = (10, 20, 30, 40, 50)
    trials: int = 2000
    methods: tuple = _ALL_METHODS
    param_ranges: dict = field(default_factory=lambda: dict(_DEFAULT_RANGES))
    sigma2: float = 1.0
    rank_k: int = 2
    master_seed: int = 12345
    inter_round_interval: float = 1.0
    processing_delay: float = 0.2
    fixed_params: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "n_rounds_grid", tuple(int(n) for n in self.n_rounds_grid))
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not self.n_rounds_grid or any(n < 2 for n in self.n_rounds_grid):
            raise ValueError("every grid value must be >= 2")
        for name in ("alpha", "beta", "d"):
            lo, hi = self.param_ranges[name]
            if not lo <= hi:
                raise ValueError(f"empty range for {name}: ({lo}, {hi})")
        unknown = set(self.methods) - set(_ALL_METHODS)
        if unknown or not self.methods:
            raise ValueError(f"methods must be a nonempty subset of {_ALL_METHODS}")
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be >= 0")
        if self.rank_k < 1:
            raise ValueError("rank_k must be >= 1")
        if not self.inter_round_interval > 0:
            raise ValueError("inter_round_interval must be positive")
        if self.processing_delay < 0:
            raise ValueError("processing_delay must be >= 0")
        if self.fixed_params is not None:
            fp = tuple(float(v) for v in self.fixed_params)
            if len(fp) != 3 or fp[0] <= 0:
                raise ValueError("fixed_params must be (alpha, beta, d) with alpha > 0")
            object.__setattr__(self, "fixed_params", fp)

    def to_json_dict(self) -> dict:
        out = asdict(self)
        out["n_rounds_grid"] = list(self.n_rounds_grid)
        out["methods"] = list(self.methods)
        out["param_ranges"] = {k: list(v) for k, v in self.param_ranges.items()}
        out["fixed_params"] = None if self.fixed_params is None else list(self.fixed_params)
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        kwargs = dict(data)
        if "param_ranges" in kwargs:
            merged = dict(_DEFAULT_RANGES)
            merged.update({k: tuple(v) for k, v in kwargs["param_ranges"].items()})
            kwargs["param_ranges"] = merged
        if kwargs.get("fixed_params") is not None:
            kwargs["fixed_params"] = tuple(kwargs["fixed_params"])
        return cls(**kwargs)

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class ResultRow:
    n: int
    method: str
    mse_alpha: float
    mse_beta: float
    crlb_alpha: float
    crlb_beta: float
    trials: int
    wall_time_ms: float


@dataclass
class ResultTable:
    """One row per (N, method); bound columns are trial-averaged."""

    rows: list
    # extra labeled data that rides along but is not part of the CSV contract
    protocol_crlb: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def by_method(self, method: str) -> list:
        return sorted((r for r in self.rows if r.method == method), key=lambda r: r.n)


@dataclass(frozen=True)
class TrialResult:
    """Squared errors per method plus the bound values for one trial."""

    errors: dict
    crlb_alpha: float
    crlb_beta: float
    crlb_alpha_protocol: float
    crlb_beta_protocol: float
    failed: bool


def _trial_rng(config: ExperimentConfig, n: int, trial_index: int):
    seq = np.random.SeedSequence(config.master_seed, spawn_key=(n, trial_index))
    return np.random.default_rng(seq)


def _draw_trial(config: ExperimentConfig, n: int, trial_index: int):
    """Per-trial draws in a pinned order: alpha, beta, d, then X, then Y."""
    rng = _trial_rng(config, n, trial_index)
    if config.fixed_params is not None:
        alpha, beta, d = config.fixed_params
    else:
        alpha = rng.uniform(*config.param_ranges["alpha"])
        beta = rng.uniform(*config.param_ranges["beta"])
        d = rng.uniform(*config.param_ranges["d"])
    sigma = float(np.sqrt(config.sigma2))
    x = rng.normal(0.0, sigma, n)
    y = rng.normal(0.0, sigma, n)
    return alpha, beta, d, x, y


def _schedule(config: ExperimentConfig, n: int) -> np.ndarray:
    return np.arange(n, dtype=np.float64) * config.inter_round_interval


def run_trial(config: ExperimentConfig, n: int, trial_index: int) -> TrialResult:
    """Simulate, denoise, estimate, and bound a single trial."""
    alpha, beta, d, x, y = _draw_trial(config, n, trial_index)
    out = _kernels.run_single_trial(
        _schedule(config, n),
        alpha,
        beta,
        d,
        config.processing_delay,
        config.sigma2,
        config.rank_k,
        x,
        y,
    )
    failed = out[_STATUS] != _kernels.OK
    errors = {m: (out[c[0]], out[c[1]]) for m, c in _ERR_COLS.items() if m in config.methods}
    return TrialResult(
        errors=errors,
        crlb_alpha=out[_CRLB_A],
        crlb_beta=out[_CRLB_B],
        crlb_alpha_protocol=out[_CRLB_A_HAT],
        crlb_beta_protocol=out[_CRLB_B_HAT],
        failed=failed,
    )


def run_experiment(config: ExperimentConfig) -> ResultTable:
    """Full grid sweep. MSE is the mean squared error over successful trials."""
    rows = []
    protocol_crlb = {}
    failures = {}
    timings = {}
    m = config.trials
    for n in config.n_rounds_grid:
        t1 = _schedule(config, n)
        alphas = np.empty(m)
        betas = np.empty(m)
        ds = np.empty(m)
        xs = np.empty((m, n))
        ys = np.empty((m, n))
        for i in range(m):
            alphas[i], betas[i], ds[i], xs[i], ys[i] = _draw_trial(config, n, i)
        started = time.perf_counter()
        out = _kernels.run_trial_batch(
            t1, alphas, betas, ds,
            config.processing_delay, config.sigma2, config.rank_k, xs, ys,
        )
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        ok = out[:, _STATUS] == _kernels.OK
        n_ok = int(np.count_nonzero(ok))
        failures[n] = m - n_ok
        timings[n] = elapsed_ms
        crlb_a = float(np.mean(out[ok, _CRLB_A])) if n_ok else float("nan")
        crlb_b = float(np.mean(out[ok, _CRLB_B])) if n_ok else float("nan")
        protocol_crlb[n] = (
            float(np.mean(out[ok, _CRLB_A_HAT])) if n_ok else float("nan"),
            float(np.mean(out[ok, _CRLB_B_HAT])) if n_ok else float("nan"),
        )
        for method in config.methods:
            ca, cb = _ERR_COLS[method]
            rows.append(
                ResultRow(
                    n=n,
                    method=method,
                    mse_alpha=float(np.mean(out[ok, ca])) if n_ok else float("nan"),
                    mse_beta=float(np.mean(out[ok, cb])) if n_ok else float("nan"),
                    crlb_alpha=crlb_a,
                    crlb_beta=crlb_b,
                    trials=n_ok,
                    wall_time_ms=0.0,
                )
            )
    meta = {
        "backend": get_backend(),
        "failed_trials": {str(n): failures[n] for n in config.n_rounds_grid},
        "measured_wall_time_ms": {str(n): timings[n] for n in config.n_rounds_grid},
        "config": config.to_json_dict(),
    }
    return ResultTable(rows=rows, protocol_crlb=protocol_crlb, meta=meta)


_CSV_HEADER = "n,method,mse_alpha,mse_beta,crlb_alpha,crlb_beta,trials,wall_time_ms"


def format_results_csv(table: ResultTable) -> str:
    lines = [_CSV_HEADER]
    for r in table.rows:
        lines.append(
            f"{r.n},{r.method},{r.mse_alpha:.17g},{r.mse_beta:.17g},"
            f"{r.crlb_alpha:.17g},{r.crlb_beta:.17g},{r.trials},{r.wall_time_ms:.17g}"
        )
    return "\n".join(lines) + "\n"


def parse_results_csv(text: str) -> ResultTable:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != _CSV_HEADER:
        raise ValueError("unexpected results CSV header")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        rows.append(
            ResultRow(
                n=int(parts[0]),
                method=parts[1],
                mse_alpha=float(parts[2]),
                mse_beta=float(parts[3]),
                crlb_alpha=float(parts[4]),
                crlb_beta=float(parts[5]),
                trials=int(parts[6]),
                wall_time_ms=float(parts[7]),
            )
        )
    return ResultTable(rows=rows)


def _plot_curves(table: ResultTable, path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "clocksync"}):
        fig, axes = plt.subplots(1, 2, figsize=(11, 4.5))
        labels = {"MLE_RAW": "MLE (raw)", "MLE_SVD": "SVD truncation", "MLE_LRMA": "nuclear norm"}
        methods = sorted({r.method for r in table.rows}, key=_ALL_METHODS.index)
        for axis, which, title in ((axes[0], "alpha", "skew"), (axes[1], "beta", "offset")):
            for method in methods:
                rows = table.by_method(method)
                axis.plot(
                    [r.n for r in rows],
                    [getattr(r, f"mse_{which}") for r in rows],
                    marker="o",
                    label=labels[method],
                )
            any_rows = table.by_method(methods[0]) if methods else []
            if any_rows:
                axis.plot(
                    [r.n for r in any_rows],
                    [getattr(r, f"crlb_{which}") for r in any_rows],
                    "k--",
                    label="CRLB (true noise)",
                )
            if table.protocol_crlb:
                ns = sorted(table.protocol_crlb)
                idx = 0 if which == "alpha" else 1
                axis.plot(
                    ns,
                    [table.protocol_crlb[n][idx] for n in ns],
                    "k:",
                    label="CRLB (estimated noise)",
                )
            axis.set_yscale("log")
            axis.set_xlabel("synchronization rounds N")
            axis.set_ylabel(f"MSE of {title}")
            axis.grid(True, which="both", alpha=0.3)
            axis.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(path, format="svg")
        plt.close(fig)


def emit_outputs(table: ResultTable, out_dir) -> dict:
    """Write results.csv, results.json, curves.svg, and run_meta.json."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = out_dir / "results.csv"
        csv_path.write_text(format_results_csv(table))
        json_path = out_dir / "results.json"
        payload = {
            "results": [asdict(r) for r in table.rows],
            "crlb_protocol_sigma_hat": [
                {"n": n, "crlb_alpha": v[0], "crlb_beta": v[1]}
                for n, v in sorted(table.protocol_crlb.items())
            ],
        }
        json_path.write_text(json.dumps(payload, indent=2) + "\n")
        svg_path = out_dir / "curves.svg"
        _plot_curves(table, svg_path)
        meta_path = out_dir / "run_meta.json"
        meta_path.write_text(json.dumps(table.meta, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write experiment outputs under {out_dir}: {exc}") from exc
    return {
        "results.csv": csv_path,
        "results.json": json_path,
        "curves.svg": svg_path,
        "run_meta.json": meta_path,
    }
