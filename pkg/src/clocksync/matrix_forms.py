"""Algebraic views of a synchronization cycle.

Two representations feed the rest of the pipeline: the N x 4 timestamp matrix
(rows are rounds, columns are T1..T4) that the denoisers operate on, and the
stacked 2N x 3 linear system whose least-squares solution carries the clock
parameters as psi = (1/skew, offset/skew, fixed_delay).
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .clock_model import ClockParams
from .exchange_sim import ExchangeLog, read_rows_csv, write_rows_csv


@dataclass(frozen=True)
class TimestampMatrix:
    """N x 4 timestamp matrix, column order (T1, T2, T3, T4)."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[1] != 4:
            raise ValueError(f"expected an N x 4 matrix, got shape {values.shape}")
        if values.shape[0] < 2:
            raise ValueError("need at least 2 rounds")
        if not np.all(np.isfinite(values)):
            raise ValueError("timestamps must be finite")
        object.__setattr__(self, "values", values)

    @property
    def rounds(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class StackedSystem:
    """Design matrix ta (2N x 3) and response tb (2N) of the joint solve.

    Rows 1..N come from the uplink (T1 side), rows N+1..2N from the downlink
    (negated T4 side); the sign columns encode which direction each row is.
    """

    ta: np.ndarray
    tb: np.ndarray
    n_rounds: int

    def __post_init__(self):
        ta = np.asarray(self.ta, dtype=np.float64)
        tb = np.asarray(self.tb, dtype=np.float64)
        n = self.n_rounds
        if ta.shape != (2 * n, 3) or tb.shape != (2 * n,):
            raise ValueError(f"inconsistent stacked shapes {ta.shape}, {tb.shape} for N={n}")
        if np.any(ta[:n, 1] != -1.0) or np.any(ta[n:, 1] != 1.0) or np.any(ta[:, 2] != -1.0):
            raise ValueError("sign columns of the stacked design are malformed")
        object.__setattr__(self, "ta", ta)
        object.__setattr__(self, "tb", tb)


@dataclass(frozen=True)
class ParamVector:
    """Solver coordinates: psi1 = 1/skew, psi2 = offset/skew, psi3 = delay.

    psi1 is positive for any physical clock; only the exactly-degenerate
    psi1 = 0 is rejected here so that diagnostic paths can still inspect
    pathological solver output.
    """

    psi1: float
    psi2: float
    psi3: float

    def __post_init__(self):
        if self.psi1 == 0:
            raise ValueError("psi1 = 0 signals a degenerate least-squares output")

    def as_array(self) -> np.ndarray:
        return np.array([self.psi1, self.psi2, self.psi3], dtype=np.float64)


def build_timestamp_matrix(log: ExchangeLog) -> TimestampMatrix:
    """Matrix view of an exchange log: entry (i, j) is timestamp j of round i."""
    return TimestampMatrix(log.rows.copy())


def build_stacked(matrix: TimestampMatrix | np.ndarray) -> StackedSystem:
    """Stack N rounds into the 2N-equation linear system."""
    values = matrix.values if isinstance(matrix, TimestampMatrix) else np.asarray(matrix, dtype=np.float64)
    if values.ndim != 2 or values.shape[1] != 4 or values.shape[0] < 2:
        raise ValueError(f"need an N x 4 matrix with N >= 2, got shape {values.shape}")
    ta, tb = _kernels.build_stacked_arrays(values)
    return StackedSystem(ta, tb, values.shape[0])


def params_from_psi(psi: ParamVector) -> tuple[ClockParams, float]:
    """Invert the solver coordinates: skew = 1/psi1, offset = psi2/psi1, d = psi3."""
    return ClockParams(skew=1.0 / psi.psi1, offset=psi.psi2 / psi.psi1), psi.psi3


def write_matrix_csv(matrix: TimestampMatrix, path) -> None:
    write_rows_csv(matrix.values, path)


def read_matrix_csv(path) -> TimestampMatrix:
    return TimestampMatrix(read_rows_csv(path))
