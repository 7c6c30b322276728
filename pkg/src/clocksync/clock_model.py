"""Affine clock model relating a local clock to the reference node.

The reference node A and local node B are tied by t_A = skew * t_B + offset.
Skew is a dimensionless rate ratio, offset is in seconds. Both are treated
as constant over a synchronization cycle.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class ClockParams:
    """Ground-truth (skew, offset) pair for node B relative to node A.

    A physical oscillator never runs backward, so skew must be positive.
    """

    skew: float
    offset: float

    def __post_init__(self):
        if not self.skew > 0:
            raise ValueError(f"skew must be positive, got {self.skew}")


def to_reference(t_local: float, params: ClockParams) -> float:
    """Map a node-B timestamp onto node A's time axis."""
    return params.skew * t_local + params.offset


def to_local(t_reference: float, params: ClockParams) -> float:
    """Map a node-A timestamp onto node B's time axis (inverse of to_reference)."""
    if params.skew == 0:
        raise ValueError("degenerate clock: skew is zero")
    return (t_reference - params.offset) / params.skew
