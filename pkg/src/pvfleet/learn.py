"""Learning pairwise anomaly intervals from labeled training days.

For an ordered pair (i, k), ``a`` is the largest relative difference seen on
days where i was labeled incorrect and k correct, and ``b`` the smallest seen
on days where both were correct. Differences at or below ``a`` count as
anomalous for i, at or above ``b`` as suitable. Missing or contradictory
evidence is handled by, in order: mirroring the width of the reverse pair,
collapsing to a step (``a == b``), and exchanging ``a`` and ``b``.
"""

from __future__ import annotations

import datetime as dt
import enum
import json
import os
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .fuzzy import MembershipFunction
from .ingest import DailySeries, DayLabel, DayLabelSet, Registry
from .performance import difference_cube

MODEL_VERSION = 1


class LearningError(ValueError):
    pass


class Provenance(enum.Enum):
    DIRECT = "direct"
    SWAPPED = "swapped"
    SYMMETRY = "symmetry"
    STEP = "step"


@dataclass(frozen=True)
class PairInterval:
    a: float
    b: float
    provenance: Provenance

    def __post_init__(self):
        if not self.a <= self.b:
            raise LearningError(f"interval must satisfy a <= b, got [{self.a}, {self.b}]")
        if self.provenance is Provenance.STEP and self.a != self.b:
            raise LearningError("step intervals must have a == b")

    @property
    def membership(self) -> MembershipFunction:
        return MembershipFunction.from_interval(self.a, self.b)


@dataclass(frozen=True)
class IntervalModel:
    facilities: tuple[str, ...]
    pairs: Mapping[tuple[str, str], PairInterval]
    trained_from: dt.date | None = None
    trained_to: dt.date | None = None

    def interval(self, i: str, k: str) -> PairInterval:
        return self.pairs[i, k]

    def membership(self, i: str, k: str) -> MembershipFunction:
        return self.pairs[i, k].membership

    def provenance_matrix(self, provenance: Provenance) -> np.ndarray:
        """0/1 matrix marking pairs with the given provenance; diagonal is -1."""
        n = len(self.facilities)
        out = -np.eye(n, dtype=int)
        for r, i in enumerate(self.facilities):
            for c, k in enumerate(self.facilities):
                if r != c:
                    out[r, c] = int(self.pairs[i, k].provenance is provenance)
        return out

    def to_json(self) -> str:
        doc = {
            "version": MODEL_VERSION,
            "facilities": list(self.facilities),
            "pairs": [
                {"i": i, "k": k, "a": p.a, "b": p.b, "provenance": p.provenance.value}
                for (i, k), p in sorted(self.pairs.items(), key=lambda kv: (
                    self.facilities.index(kv[0][0]), self.facilities.index(kv[0][1])))
            ],
            "trained_from": self.trained_from.isoformat() if self.trained_from else None,
            "trained_to": self.trained_to.isoformat() if self.trained_to else None,
        }
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "IntervalModel":
        doc = json.loads(text)
        if doc.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {doc.get('version')!r}")
        pairs = {(p["i"], p["k"]): PairInterval(float(p["a"]), float(p["b"]), Provenance(p["provenance"]))
                 for p in doc["pairs"]}
        facilities = tuple(doc["facilities"])
        missing = [(i, k) for i in facilities for k in facilities if i != k and (i, k) not in pairs]
        if missing:
            raise ValueError(f"model is missing pairs: {missing}")
        parse = lambda s: dt.date.fromisoformat(s) if s else None  # noqa: E731
        return cls(facilities, pairs, parse(doc.get("trained_from")), parse(doc.get("trained_to")))

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "IntervalModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


# --------------------------------------------------------------------------
# training samples


@dataclass(frozen=True)
class _Samples:
    """Relative differences per ordered pair, split by label combination."""

    facilities: tuple[str, ...]
    dates: tuple[dt.date, ...]
    cube: np.ndarray  # (D, n, n)
    correct: np.ndarray  # (n, D) bool
    incorrect: np.ndarray  # (n, D) bool

    def incorrect_correct(self, i: int, k: int) -> np.ndarray:
        """Differences of i vs k on days with i incorrect and k correct."""
        vals = self.cube[self.incorrect[i] & self.correct[k], i, k]
        return vals[~np.isnan(vals)]

    def correct_correct(self, i: int, k: int) -> np.ndarray:
        vals = self.cube[self.correct[i] & self.correct[k], i, k]
        return vals[~np.isnan(vals)]


def _samples(series: DailySeries, labels: DayLabelSet, registry: Registry | None = None,
             start: dt.date | None = None, end: dt.date | None = None) -> _Samples:
    in_window = np.array([(start is None or d >= start) and (end is None or d <= end)
                          for d in series.dates], dtype=bool)
    n, D = len(series.facilities), len(series.dates)
    correct = np.zeros((n, D), dtype=bool)
    incorrect = np.zeros((n, D), dtype=bool)
    for (f, d), lab in labels.labels.items():
        di = series.date_index(d)
        if di is None or f not in series.facilities or not in_window[di]:
            continue
        fi = series.facility_index(f)
        if lab is DayLabel.CORRECT:
            correct[fi, di] = True
        elif lab is DayLabel.INCORRECT:
            incorrect[fi, di] = True
    cube = difference_cube(series, registry)
    return _Samples(series.facilities, series.dates, cube, correct, incorrect)


def _max_or_none(vals: np.ndarray) -> float | None:
    return float(vals.max()) if vals.size else None


def _min_or_none(vals: np.ndarray) -> float | None:
    return float(vals.min()) if vals.size else None


# --------------------------------------------------------------------------
# public steps


def raw_interval(i: str, k: str, series: DailySeries, labels: DayLabelSet,
                 registry: Registry | None = None) -> tuple[float | None, float | None]:
    """Unresolved ``(a, b)`` for the pair; either side is None when its day set is empty."""
    s = _samples(series, labels, registry)
    ii, kk = series.facility_index(i), series.facility_index(k)
    return _max_or_none(s.incorrect_correct(ii, kk)), _min_or_none(s.correct_correct(ii, kk))


def _resolve(a: float, b: float, ic: np.ndarray, cc: np.ndarray, pair) -> tuple[float, float, bool]:
    if a < b:
        return a, b, False
    a2, b2 = float(cc.min()), float(ic.max())
    if a2 > b2:
        raise LearningError(
            f"irreconcilable label inconsistency for pair {pair}: exchanged interval "
            f"[{a2}, {b2}] is still inverted")
    return a2, b2, True


def resolve_inconsistency(a: float, b: float, i: str, k: str, series: DailySeries,
                          labels: DayLabelSet, registry: Registry | None = None) -> tuple[float, float, bool]:
    """Order ``(a, b)``; when ``a >= b`` the label roles are exchanged and recomputed.

    Returns ``(a', b', swapped)``.
    """
    s = _samples(series, labels, registry)
    ii, kk = series.facility_index(i), series.facility_index(k)
    ic, cc = s.incorrect_correct(ii, kk), s.correct_correct(ii, kk)
    if a >= b and (ic.size == 0 or cc.size == 0):
        raise LearningError(f"cannot exchange roles for pair {(i, k)}: a label day set is empty")
    return _resolve(a, b, ic, cc, (i, k))


def symmetry_fallback(b_ik: float, a_ki: float, b_ki: float) -> float:
    """Lower bound for (i, k) giving it the same width as the resolved (k, i) interval."""
    if b_ki < a_ki:
        raise AssertionError(f"mirror interval is inverted: [{a_ki}, {b_ki}]")
    return b_ik - (b_ki - a_ki)


def learn_intervals(series: DailySeries, labels: DayLabelSet, registry: Registry | None = None,
                    start: dt.date | None = None, end: dt.date | None = None) -> IntervalModel:
    """Fit an :class:`IntervalModel` from labeled days in ``[start, end]``.

    Degenerate and unlabeled days are ignored. Pairs whose interval can be
    computed from the data are resolved first; pairs that need the reverse
    pair's interval are resolved in a second pass.
    """
    names = series.facilities
    if len(names) < 2:
        raise LearningError("at least two facilities are required")
    s = _samples(series, labels, registry, start, end)
    labeled = s.correct.any(axis=0) | s.incorrect.any(axis=0)
    if not labeled.any():
        raise LearningError("training window contains no labeled days")

    n = len(names)
    raw: dict[tuple[int, int], tuple[float | None, float | None]] = {}
    resolved: dict[tuple[int, int], PairInterval] = {}
    for i in range(n):
        for k in range(n):
            if i == k:
                continue
            ic, cc = s.incorrect_correct(i, k), s.correct_correct(i, k)
            a, b = _max_or_none(ic), _min_or_none(cc)
            raw[i, k] = (a, b)
            if a is not None and b is not None:
                a2, b2, swapped = _resolve(a, b, ic, cc, (names[i], names[k]))
                resolved[i, k] = PairInterval(a2, b2, Provenance.SWAPPED if swapped else Provenance.DIRECT)

    for (i, k), (a, b) in raw.items():
        if (i, k) in resolved:
            continue
        if a is None and b is None:
            raise LearningError(f"pair ({names[i]}, {names[k]}) has no usable labeled days")
        if a is None:
            mirror = resolved.get((k, i))
            if mirror is not None and raw[k, i][0] is not None:
                resolved[i, k] = PairInterval(symmetry_fallback(b, mirror.a, mirror.b), b, Provenance.SYMMETRY)
            else:
                resolved[i, k] = PairInterval(b, b, Provenance.STEP)
        else:
            resolved[i, k] = PairInterval(a, a, Provenance.STEP)

    used = np.nonzero(labeled)[0]
    pairs = {(names[i], names[k]): p for (i, k), p in sorted(resolved.items())}
    return IntervalModel(names, pairs, s.dates[used[0]], s.dates[used[-1]])
