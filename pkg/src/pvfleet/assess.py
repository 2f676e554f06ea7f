"""Daily assessment: differences -> memberships -> OWA score -> label -> state.

Also holds the persistence and rendering of assessments (JSON documents,
natural-language reports) and the per-day performance export used for
plotting.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import os
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .fsm import INITIAL_STATE, FacilityState, StateStore, step
from .fuzzy import LabelThresholds, OwaWeights, PerformanceLabel, drop_extremes_weights, linguistic_label, owa
from .ingest import DailySeries, Registry
from .learn import IntervalModel
from .performance import DifferenceMatrix, difference_matrix, performance_table

ASSESSMENT_VERSION = 1
MIN_COMPARISONS = 3

WeightPolicy = Callable[[int], OwaWeights]

WEIGHT_POLICIES: dict[str, WeightPolicy] = {"drop-extremes": drop_extremes_weights}


@dataclass(frozen=True)
class Settings:
    thresholds: LabelThresholds = field(default_factory=LabelThresholds)
    min_hours: int = 20
    weight_policy: str = "drop-extremes"

    @property
    def weights(self) -> WeightPolicy:
        try:
            return WEIGHT_POLICIES[self.weight_policy]
        except KeyError:
            raise ValueError(f"unknown weight policy {self.weight_policy!r}; "
                             f"supported: {sorted(WEIGHT_POLICIES)}") from None

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Settings":
        known = {"label_upper", "label_lower", "epsilon", "min_hours", "weight_policy"}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        base = LabelThresholds()
        thresholds = LabelThresholds(
            upper=float(doc.get("label_upper", base.upper)),
            lower=float(doc.get("label_lower", base.lower)),
            epsilon=float(doc.get("epsilon", base.epsilon)),
        )
        settings = cls(thresholds, int(doc.get("min_hours", 20)), str(doc.get("weight_policy", "drop-extremes")))
        settings.weights  # validate early
        return settings

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Settings":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class FacilityAssessment:
    facility_id: str
    y: float | None
    label: PerformanceLabel | None
    prior_state: FacilityState
    new_state: FacilityState
    comparisons: int

    @property
    def alert(self) -> bool:
        return self.new_state.alert

    @property
    def assessed(self) -> bool:
        return self.label is not None


@dataclass(frozen=True, eq=False)
class DailyAssessment:
    date: dt.date
    facilities: tuple[FacilityAssessment, ...]
    differences: DifferenceMatrix
    memberships: np.ndarray  # (n, n), NaN on the diagonal and for invalid cells

    def __getitem__(self, facility_id: str) -> FacilityAssessment:
        for fa in self.facilities:
            if fa.facility_id == facility_id:
                return fa
        raise KeyError(facility_id)

    @property
    def states(self) -> dict[str, FacilityState]:
        return {fa.facility_id: fa.new_state for fa in self.facilities}

    @property
    def any_alert(self) -> bool:
        return any(fa.alert for fa in self.facilities)


def membership_matrix(model: IntervalModel, dm: DifferenceMatrix) -> np.ndarray:
    n = dm.n
    mu = np.full((n, n), np.nan)
    for r, i in enumerate(dm.facilities):
        for c, k in enumerate(dm.facilities):
            if r != c and dm.valid[r, c]:
                mu[r, c] = model.membership(i, k)(dm.cells[r, c])
    return mu


def assess_day(model: IntervalModel, series: DailySeries, date: dt.date,
               prior_states: Mapping[str, FacilityState] | None = None,
               settings: Settings | None = None) -> DailyAssessment:
    """Assess every model facility on ``date``.

    A facility whose row has fewer than three valid comparisons gets no
    score or label and keeps its prior state.
    """
    settings = settings or Settings()
    prior_states = prior_states or {}
    missing = set(model.facilities) - set(series.facilities)
    if missing:
        raise ValueError(f"model facilities missing from series: {sorted(missing)}")
    dm = difference_matrix(date, series, facilities=model.facilities)
    mu = membership_matrix(model, dm)
    out = []
    for r, fid in enumerate(model.facilities):
        prior = prior_states.get(fid, INITIAL_STATE)
        row = mu[r][~np.isnan(mu[r])]
        if row.size < MIN_COMPARISONS:
            out.append(FacilityAssessment(fid, None, None, prior, prior, int(row.size)))
            continue
        y = owa(row, settings.weights(row.size))
        label = linguistic_label(y, thresholds=settings.thresholds)
        out.append(FacilityAssessment(fid, y, label, prior, step(prior, label), int(row.size)))
    mu.setflags(write=False)
    return DailyAssessment(date, tuple(out), dm, mu)


def assess_range(model: IntervalModel, series: DailySeries, start: dt.date, end: dt.date,
                 state_file: str | os.PathLike | None = None,
                 prior_states: Mapping[str, FacilityState] | None = None,
                 settings: Settings | None = None) -> list[DailyAssessment]:
    """Assess the series days in ``[start, end]`` in order, carrying states forward.

    With ``state_file`` the starting states are read from it (the latest
    entry before ``start``) and the state of every assessed day is written
    back under an exclusive lock.
    """
    if end < start:
        raise ValueError("end precedes start")
    dates = [d for d in series.dates if start <= d <= end]
    if not dates:
        return []
    if state_file is None:
        return _fold(model, series, dates, dict(prior_states or {}), settings)
    store = StateStore(state_file)
    with store.lock:
        states = store.state_before(model.facilities, dates[0])
        if prior_states:
            states.update(prior_states)
        results = _fold(model, series, dates, states, settings)
        store.record({f: {a.date: a[f].new_state for a in results} for f in model.facilities})
    return results


def _fold(model, series, dates, states, settings):
    results = []
    for d in dates:
        a = assess_day(model, series, d, states, settings)
        states = a.states
        results.append(a)
    return results


# --------------------------------------------------------------------------
# persistence


def _matrix_to_json(m: np.ndarray) -> list[list[float | None]]:
    return [[None if np.isnan(v) else float(v) for v in row] for row in m]


def _matrix_from_json(rows) -> np.ndarray:
    return np.array([[np.nan if v is None else v for v in row] for row in rows], dtype=float)


def assessments_to_json(assessments: Sequence[DailyAssessment]) -> str:
    days = []
    for a in assessments:
        days.append({
            "date": a.date.isoformat(),
            "facilities": [
                {
                    "facility": fa.facility_id,
                    "y": fa.y,
                    "label": fa.label.value if fa.label else None,
                    "prior_state": fa.prior_state.value,
                    "new_state": fa.new_state.value,
                    "alert": fa.alert,
                    "comparisons": fa.comparisons,
                }
                for fa in a.facilities
            ],
            "differences": _matrix_to_json(np.where(a.differences.valid, a.differences.cells, np.nan)),
            "memberships": _matrix_to_json(a.memberships),
        })
    return json.dumps({"version": ASSESSMENT_VERSION, "assessments": days}, indent=2) + "\n"


def assessments_from_json(text: str) -> list[DailyAssessment]:
    doc = json.loads(text)
    if doc.get("version") != ASSESSMENT_VERSION:
        raise ValueError(f"unsupported assessment version {doc.get('version')!r}")
    out = []
    for day in doc["assessments"]:
        date = dt.date.fromisoformat(day["date"])
        facs = tuple(
            FacilityAssessment(
                f["facility"], f["y"], PerformanceLabel(f["label"]) if f["label"] else None,
                FacilityState(f["prior_state"]), FacilityState(f["new_state"]), int(f["comparisons"]))
            for f in day["facilities"]
        )
        cells = _matrix_from_json(day["differences"])
        valid = ~np.isnan(cells)
        names = tuple(fa.facility_id for fa in facs)
        out.append(DailyAssessment(date, facs, DifferenceMatrix(date, names, cells, valid),
                                   _matrix_from_json(day["memberships"])))
    return out


# --------------------------------------------------------------------------
# rendering


def render_line(date: dt.date, fa: FacilityAssessment) -> str:
    action = "; ACTION: inspect" if fa.alert else ""
    if not fa.assessed:
        return f"{date.isoformat()}: facility {fa.facility_id} insufficient data; status held " \
               f"({fa.new_state.long_name}){action}"
    return (f"{date.isoformat()}: facility {fa.facility_id} performance {fa.y * 100:.1f}% "
            f"({fa.label.long_name}); status {fa.new_state.long_name}{action}")


def render_report(assessment: DailyAssessment) -> str:
    return "\n".join(render_line(assessment.date, fa) for fa in assessment.facilities) + "\n"


def emit_plot_data(series: DailySeries, registry: Registry | None, start: dt.date, end: dt.date) -> str:
    """CSV ``date,facility,rho`` for every usable facility-day in ``[start, end]``."""
    if end < start:
        raise ValueError("end precedes start")
    rho = performance_table(series, registry)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["date", "facility", "rho"])
    for di, d in enumerate(series.dates):
        if not start <= d <= end:
            continue
        for fi, f in enumerate(series.facilities):
            if not np.isnan(rho[fi, di]):
                writer.writerow([d.isoformat(), f, repr(float(rho[fi, di]))])
    return buf.getvalue()
