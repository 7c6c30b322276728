"""Cramer-Rao lower bounds for the skew and offset estimates.

Closed-form bounds computed from three scalar moments (U, V, W) of the send
and reply schedules. The offset enters only through t3 - offset, so shifting
both together leaves the bounds unchanged. Note the bounds are not linear in
the noise variance: U carries an additive skew^2 * sigma2 term.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels


class DegenerateGeometryError(ValueError):
    """The timestamp configuration carries no usable information (denominator <= 0)."""


@dataclass(frozen=True)
class CrlbInputs:
    """True parameters plus the send (t1) and reply (t3) times of one cycle."""

    alpha: float
    beta: float
    d: float
    sigma2: float
    t1: np.ndarray = field(repr=False)
    t3: np.ndarray = field(repr=False)

    def __post_init__(self):
        t1 = np.asarray(self.t1, dtype=np.float64)
        t3 = np.asarray(self.t3, dtype=np.float64)
        if t1.ndim != 1 or t1.shape != t3.shape or t1.size < 2:
            raise ValueError(f"t1 and t3 must be equal-length vectors of N >= 2, got {t1.shape} and {t3.shape}")
        if self.sigma2 < 0:
            raise ValueError(f"sigma2 must be >= 0, got {self.sigma2}")
        object.__setattr__(self, "t1", t1)
        object.__setattr__(self, "t3", t3)


def _bounds(inputs: CrlbInputs) -> tuple[float, float]:
    skew, offset, status = _kernels.crlb_terms(
        inputs.alpha, inputs.beta, inputs.d, inputs.sigma2, inputs.t1, inputs.t3
    )
    if status == _kernels.DEGENERATE_GEOMETRY:
        raise DegenerateGeometryError(
            "information-singular timestamp configuration: bound denominator <= 0"
        )
    return skew, offset


def crlb_skew(inputs: CrlbInputs) -> float:
    """Variance lower bound for the skew estimate."""
    return _bounds(inputs)[0]


def crlb_offset(inputs: CrlbInputs) -> float:
    """Variance lower bound for the offset estimate."""
    return _bounds(inputs)[1]
