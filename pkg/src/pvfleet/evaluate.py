"""Confusion-matrix evaluation of predicted alerts against ground truth.

Layout follows the usual convention for this system: rows are predicted
conditions, columns actual conditions, with the model error in the last
column and the error of use in the last row.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping, Sequence

from .fsm import FacilityState


def to_alert(state: FacilityState) -> bool:
    return state.alert


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError(f"counts must be non-negative: {self}")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.tp + other.tp, self.fp + other.fp,
                               self.tn + other.tn, self.fn + other.fn)


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


@dataclass(frozen=True)
class ErrorRates:
    """Error fractions in [0, 1]; None where the denominator is zero."""

    model_error_no_alert: float | None
    model_error_alert: float | None
    use_error_no_alert: float | None
    use_error_alert: float | None
    total_error: float | None


def confusion_matrix(predicted: Sequence[bool], actual: Sequence[bool]) -> ConfusionMatrix:
    if len(predicted) != len(actual):
        raise ValueError(f"length mismatch: {len(predicted)} predicted vs {len(actual)} actual")
    tp = fp = tn = fn = 0
    for p, a in zip(predicted, actual):
        if p and a:
            tp += 1
        elif p:
            fp += 1
        elif a:
            fn += 1
        else:
            tn += 1
    return ConfusionMatrix(tp, fp, tn, fn)


def error_rates(cm: ConfusionMatrix) -> ErrorRates:
    return ErrorRates(
        model_error_no_alert=_ratio(cm.fn, cm.fn + cm.tn),
        model_error_alert=_ratio(cm.fp, cm.fp + cm.tp),
        use_error_no_alert=_ratio(cm.fp, cm.tn + cm.fp),
        use_error_alert=_ratio(cm.fn, cm.fn + cm.tp),
        total_error=_ratio(cm.fn + cm.fp, cm.total),
    )


@dataclass(frozen=True)
class WarningBreakdown:
    """False negatives split by whether the missed day was already in the NRC state."""

    fn_nrc: int
    fn_other: int
    fp: int


def warning_breakdown(states: Sequence[FacilityState], actual: Sequence[bool]) -> WarningBreakdown:
    if len(states) != len(actual):
        raise ValueError(f"length mismatch: {len(states)} states vs {len(actual)} actual")
    fn_nrc = sum(1 for s, a in zip(states, actual) if a and s is FacilityState.NRC)
    fn_other = sum(1 for s, a in zip(states, actual) if a and s is FacilityState.OK)
    fp = sum(1 for s, a in zip(states, actual) if s.alert and not a)
    return WarningBreakdown(fn_nrc, fn_other, fp)


def warning_adjusted_error(breakdowns: Iterable[WarningBreakdown], n_days: int) -> float:
    """Fleet-wide misses that were not even warned about, per evaluated day.

    NRC days are treated as warnings rather than misses; the remaining false
    negatives and false positives of all facilities are pooled and divided by
    the length of the evaluation period.
    """
    if n_days <= 0:
        raise ValueError("n_days must be positive")
    return sum(b.fn_other + b.fp for b in breakdowns) / n_days


# --------------------------------------------------------------------------
# reporting


def format_percent(rate: float | None, digits: int = 2) -> str:
    """Percent string; undefined rates print as ``0% (undefined)``."""
    if rate is None:
        return "0% (undefined)"
    return f"{rate * 100:.{digits}f}%"


def render_matrix(name: str, cm: ConfusionMatrix, digits: int = 2) -> str:
    r = error_rates(cm)
    rows = [
        [name, "No Alert", "Alert", "Model error"],
        ["No Alert", str(cm.tn), str(cm.fn), format_percent(r.model_error_no_alert, digits)],
        ["Alert", str(cm.fp), str(cm.tp), format_percent(r.model_error_alert, digits)],
        ["Error of use", format_percent(r.use_error_no_alert, digits),
         format_percent(r.use_error_alert, digits), format_percent(r.total_error, digits)],
    ]
    widths = [max(len(row[c]) for row in rows) for c in range(4)]
    lines = [" | ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    rule = "-+-".join("-" * w for w in widths)
    return "\n".join([lines[0], rule, lines[1], lines[2], rule, lines[3]])


def report_json(matrices: Mapping[str, ConfusionMatrix],
                breakdowns: Mapping[str, WarningBreakdown] | None = None,
                n_days: int | None = None) -> str:
    doc = {"facilities": []}
    for name, cm in matrices.items():
        entry = {"facility": name, "matrix": asdict(cm), "rates": asdict(error_rates(cm))}
        if breakdowns and name in breakdowns:
            entry["warnings"] = asdict(breakdowns[name])
        doc["facilities"].append(entry)
    if breakdowns and n_days:
        doc["warning_adjusted_error"] = warning_adjusted_error(breakdowns.values(), n_days)
    return json.dumps(doc, indent=2) + "\n"
