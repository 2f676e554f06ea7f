"""Membership functions, OWA aggregation and linguistic performance labels."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

WEIGHT_SUM_TOL = 1e-12
DEFAULT_EPSILON = 1e-9


class Shape(enum.Enum):
    TRAPEZOID = "trapezoid"
    STEP = "step"


@dataclass(frozen=True)
class MembershipFunction:
    """Degree of suitable pairwise performance as a function of the relative difference.

    A trapezoid ramps linearly from 0 at ``a`` to 1 at ``b``; a step jumps from
    0 to 1 at ``b``. Both are non-decreasing.
    """

    a: float
    b: float
    shape: Shape = Shape.TRAPEZOID

    def __post_init__(self):
        if self.shape is Shape.TRAPEZOID and not self.a < self.b:
            raise ValueError(f"trapezoid requires a < b, got a={self.a}, b={self.b}")
        if self.shape is Shape.STEP and self.a != self.b:
            raise ValueError(f"step requires a == b, got a={self.a}, b={self.b}")

    @classmethod
    def from_interval(cls, a: float, b: float) -> "MembershipFunction":
        return cls(a, b, Shape.STEP if a == b else Shape.TRAPEZOID)

    def __call__(self, x):
        return membership_eval(self, x)


def membership_eval(f: MembershipFunction, x):
    """Evaluate ``f`` at a scalar or array ``x``."""
    if isinstance(x, (float, int)):
        if math.isnan(x):
            return math.nan
        if f.shape is Shape.STEP:
            return 1.0 if x >= f.b else 0.0
        if x <= f.a:
            return 0.0
        if x >= f.b:
            return 1.0
        return (x - f.a) / (f.b - f.a)
    arr = np.asarray(x, dtype=float)
    if f.shape is Shape.STEP:
        out = np.where(arr >= f.b, 1.0, 0.0)
    else:
        ramp = (arr - f.a) / (f.b - f.a)
        out = np.where(arr <= f.a, 0.0, np.where(arr >= f.b, 1.0, ramp))
    out = np.where(np.isnan(arr), np.nan, out)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class OwaWeights:
    weights: tuple[float, ...]

    def __post_init__(self):
        w = self.weights
        if not w:
            raise ValueError("empty weight vector")
        if any(not 0.0 <= x <= 1.0 for x in w):
            raise ValueError(f"weights must lie in [0, 1]: {w}")
        if abs(math.fsum(w) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1, got {math.fsum(w)!r}")

    def __len__(self) -> int:
        return len(self.weights)


def drop_extremes_weights(m: int) -> OwaWeights:
    """Zero weight on the largest and smallest value, uniform on the rest."""
    if m < 3:
        raise ValueError("need at least 3 comparison values to drop extremes")
    inner = 1.0 / (m - 2)
    return OwaWeights((0.0,) + (inner,) * (m - 2) + (0.0,))


def owa(values: Sequence[float], weights: OwaWeights) -> float:
    """Ordered weighted average: weights apply to ``values`` sorted largest first."""
    vals = np.asarray(values, dtype=float)
    if vals.shape != (len(weights),):
        raise ValueError(f"got {vals.size} values for {len(weights)} weights")
    if np.any(~((vals >= 0.0) & (vals <= 1.0))):
        raise ValueError("OWA inputs must lie in [0, 1]")
    ordered = np.sort(vals)[::-1]
    return math.fsum(w * v for w, v in zip(weights.weights, ordered))


class PerformanceLabel(enum.Enum):
    S = "S"
    LA = "LA"
    A = "A"
    VA = "VA"
    B = "B"

    @property
    def long_name(self) -> str:
        return _LONG_NAMES[self]


_LONG_NAMES = {
    PerformanceLabel.S: "suitable performance",
    PerformanceLabel.LA: "lightly anomalous performance",
    PerformanceLabel.A: "anomalous performance",
    PerformanceLabel.VA: "very anomalous performance",
    PerformanceLabel.B: "bad performance",
}


@dataclass(frozen=True)
class LabelThresholds:
    """Cut points for :func:`linguistic_label`.

    ``epsilon`` widens the exact tests ``y == 1`` and ``y == 0`` to absorb
    rounding in the aggregation.
    """

    upper: float = 0.75
    lower: float = 0.45
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if not (self.epsilon >= 0 and self.epsilon < self.lower < self.upper < 1 - self.epsilon):
            raise ValueError(f"thresholds must satisfy 0 <= eps < lower < upper < 1 - eps: {self}")


def linguistic_label(y: float, epsilon: float = DEFAULT_EPSILON,
                     thresholds: LabelThresholds | None = None) -> PerformanceLabel:
    t = thresholds if thresholds is not None else LabelThresholds(epsilon=epsilon)
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"y must lie in [0, 1], got {y}")
    if y >= 1 - t.epsilon:
        return PerformanceLabel.S
    if y >= t.upper:
        return PerformanceLabel.LA
    if y >= t.lower:
        return PerformanceLabel.A
    if y > t.epsilon:
        return PerformanceLabel.VA
    return PerformanceLabel.B
