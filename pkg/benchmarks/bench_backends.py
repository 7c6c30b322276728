"""Benchmark the numba kernels against the pure-numpy fallback.

The backend binds at import time, so each side runs in its own subprocess
with CLOCKSYNC_BACKEND set accordingly and reports the best wall time of
several repetitions of the same seeded Monte Carlo sweep.

Run: python3 benchmarks/bench_backends.py [--trials 1000] [--repeats 5]
"""

import argparse
import json
import os
import subprocess
import sys

DRIVER = """
import json, sys, time
from clocksync import ExperimentConfig, run_experiment, get_backend

trials, repeats = int(sys.argv[1]), int(sys.argv[2])
config = ExperimentConfig(n_rounds_grid=(10, 30, 50), trials=trials, master_seed=99)

# one throwaway sweep so JIT compilation stays out of the timings
run_experiment(ExperimentConfig(n_rounds_grid=(10,), trials=2, master_seed=0))

times = []
for _ in range(repeats):
    started = time.perf_counter()
    table = run_experiment(config)
    times.append(time.perf_counter() - started)

checksum = sum(r.mse_alpha + r.mse_beta for r in table.rows)
print(json.dumps({
    "backend": get_backend(),
    "best_s": min(times),
    "mean_s": sum(times) / len(times),
    "checksum": checksum,
}))
"""


def run_backend(name: str, trials: int, repeats: int) -> dict:
    env = dict(os.environ, CLOCKSYNC_BACKEND=name)
    proc = subprocess.run(
        [sys.executable, "-c", DRIVER, str(trials), str(repeats)],
        env=env,
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        raise RuntimeError(f"backend {name} failed:\n{proc.stderr}")
    return json.loads(proc.stdout)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=1000, help="trials per grid point")
    parser.add_argument("--repeats", type=int, default=5, help="timed repetitions")
    args = parser.parse_args()

    print(f"sweep: N in (10, 30, 50), {args.trials} trials each, best of {args.repeats}\n")
    results = {}
    for name in ("numpy", "numba"):
        try:
            results[name] = run_backend(name, args.trials, args.repeats)
        except RuntimeError as exc:
            print(f"{name:>6}: unavailable ({exc})")
    for name, r in results.items():
        print(f"{name:>6}: best {r['best_s'] * 1e3:9.1f} ms   mean {r['mean_s'] * 1e3:9.1f} ms")

    if len(results) == 2:
        a, b = results["numpy"], results["numba"]
        if abs(a["checksum"] - b["checksum"]) > 1e-9 * max(1.0, abs(a["checksum"])):
            print("\nWARNING: backends disagree on the result checksum")
        print(f"\nspeedup (numpy best / numba best): {a['best_s'] / b['best_s']:.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
