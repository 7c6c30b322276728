"""Joint estimation of clock skew, offset, and fixed delay.

The stacked system is solved by QR-based least squares rather than by forming
normal equations, and all timestamps are re-centered at the first send time
before solving so that large absolute times do not degrade conditioning. The
noise scale is not needed for the point estimate; the log-likelihood is
exposed for diagnostics.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .matrix_forms import ParamVector, StackedSystem

_METHODS = ("MLE_RAW", "MLE_SVD", "MLE_LRMA")


class SingularSystemError(ValueError):
    """The stacked design lost rank; no unique parameter solve exists."""


@dataclass(frozen=True)
class EstimateReport:
    """Point estimates from one solve plus the residual norm of the fit."""

    method: str
    alpha_hat: float
    beta_hat: float
    d_hat: float
    residual_norm: float

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}, got {self.method!r}")
        if self.residual_norm < 0:
            raise ValueError("residual_norm must be >= 0")

    @staticmethod
    def csv_header() -> str:
        return "method,alpha_hat,beta_hat,d_hat,residual_norm"

    def csv_row(self) -> str:
        return (
            f"{self.method},{self.alpha_hat:.17g},{self.beta_hat:.17g},"
            f"{self.d_hat:.17g},{self.residual_norm:.17g}"
        )


def mle_estimate(system: StackedSystem, method: str = "MLE_RAW") -> EstimateReport:
    """Least-squares solve of the stacked system, mapped back to (skew, offset, d).

    Raises SingularSystemError when the design is rank deficient (for example
    when all rounds carry identical timestamps).
    """
    c = system.tb[0]
    ta = system.ta.copy()
    ta[:, 0] = ta[:, 0] + c * ta[:, 1]
    tb = system.tb + c * system.ta[:, 1]
    psi, resid, status = _kernels.solve_stacked(ta, tb)
    if status == _kernels.RANK_DEFICIENT:
        raise SingularSystemError("stacked design matrix is rank deficient")
    if not np.isfinite(psi[0]) or psi[0] == 0.0:
        raise SingularSystemError("least squares returned a degenerate skew coordinate")
    alpha = 1.0 / psi[0]
    beta = psi[1] / psi[0] - (alpha - 1.0) * c
    return EstimateReport(
        method=method,
        alpha_hat=float(alpha),
        beta_hat=float(beta),
        d_hat=float(psi[2]),
        residual_norm=float(resid),
    )


def log_likelihood(system: StackedSystem, psi: ParamVector, sigma2: float) -> float:
    """Gaussian log-likelihood of the stacked residuals at a given psi."""
    if sigma2 <= 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    r = system.tb - system.ta @ psi.as_array()
    n = system.n_rounds
    return n * math.log(1.0 / (2.0 * math.pi * sigma2)) - float(r @ r) / (2.0 * sigma2)
