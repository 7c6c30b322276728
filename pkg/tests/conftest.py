import numpy as np
import pytest

from clocksync.harness import ExperimentConfig, run_experiment


@pytest.fixture(scope="session")
def warm_kernels():
    """Run one tiny sweep so JIT compilation never lands inside a timed test."""
    cfg = ExperimentConfig(n_rounds_grid=(4,), trials=2, master_seed=0)
    run_experiment(cfg)
    return True


@pytest.fixture(scope="session")
def ordering_table(warm_kernels):
    """The N=30, 2000-trial Monte Carlo table shared by the method-comparison tests."""
    cfg = ExperimentConfig(n_rounds_grid=(30,), trials=2000, master_seed=20240611)
    return run_experiment(cfg)


def random_orthogonal(rng, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))
