"""Parsing and validation of production data, peak-power schedules and day labels.

Three CSV formats are read here, each with a fixed header:

* production: ``facility,date,hour,energy_kwh``
* facility config: ``facility,effective_from,peak_power_kw``
* labels: ``facility,date,label`` with ``label`` in ``{correct, incorrect}``
  (training labels) or ``{alert, no-alert}`` (evaluation ground truth)

Dates are ISO ``YYYY-MM-DD`` calendar days with no timezone semantics.
"""

from __future__ import annotations

import bisect
import csv
import datetime as dt
import enum
import io
import logging
import math
import os
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Mapping, Union

import numpy as np

logger = logging.getLogger(__name__)

HOURS_PER_DAY = 24
DEFAULT_MIN_HOURS = 20

PRODUCTION_HEADER = ("facility", "date", "hour", "energy_kwh")
CONFIG_HEADER = ("facility", "effective_from", "peak_power_kw")
LABEL_HEADER = ("facility", "date", "label")

Source = Union[str, os.PathLike, IO[str], IO[bytes]]


class ParseError(ValueError):
    """A malformed input row. ``line`` is 1-based and counts the header."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DataError(ValueError):
    """Input that parses but violates a cross-record invariant."""


class NoPeakPowerError(LookupError):
    pass


@dataclass(frozen=True)
class ProductionRecord:
    facility_id: str
    date: dt.date
    hour: int
    energy_kwh: float

    def __post_init__(self):
        if not 0 <= self.hour < HOURS_PER_DAY:
            raise ValueError(f"hour out of range: {self.hour}")
        if not (self.energy_kwh >= 0 and math.isfinite(self.energy_kwh)):
            raise ValueError(f"energy must be finite and non-negative: {self.energy_kwh}")

    @property
    def key(self) -> tuple[str, dt.date, int]:
        return (self.facility_id, self.date, self.hour)


@dataclass(frozen=True)
class PeakPowerSchedule:
    """Piecewise-constant peak power of one facility, keyed by effective date."""

    facility_id: str
    entries: tuple[tuple[dt.date, float], ...]

    def __post_init__(self):
        dates = [d for d, _ in self.entries]
        if any(a >= b for a, b in zip(dates, dates[1:])):
            raise DataError(f"{self.facility_id}: schedule dates must be strictly ascending")
        for d, p in self.entries:
            if not (p > 0 and math.isfinite(p)):
                raise DataError(f"{self.facility_id}: non-positive peak power {p} from {d}")

    def lookup(self, date: dt.date) -> float:
        pos = bisect.bisect_right([d for d, _ in self.entries], date)
        if pos == 0:
            raise NoPeakPowerError(f"no peak power in effect for {self.facility_id} on {date}")
        return self.entries[pos - 1][1]


Registry = Mapping[str, PeakPowerSchedule]


class DayLabel(enum.Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"
    UNLABELED = "unlabeled"


@dataclass(frozen=True)
class DayLabelSet:
    """Correct/incorrect training labels per (facility, date); absent pairs are unlabeled."""

    labels: Mapping[tuple[str, dt.date], DayLabel] = field(default_factory=dict)

    def get(self, facility_id: str, date: dt.date) -> DayLabel:
        return self.labels.get((facility_id, date), DayLabel.UNLABELED)

    def days(self, facility_id: str, label: DayLabel) -> set[dt.date]:
        return {d for (f, d), lab in self.labels.items() if f == facility_id and lab is label}

    def correct_days(self, facility_id: str) -> set[dt.date]:
        return self.days(facility_id, DayLabel.CORRECT)

    def incorrect_days(self, facility_id: str) -> set[dt.date]:
        return self.days(facility_id, DayLabel.INCORRECT)

    def relabel(self, updates: Mapping[tuple[str, dt.date], DayLabel]) -> "DayLabelSet":
        merged = dict(self.labels)
        for key, lab in updates.items():
            if lab is DayLabel.UNLABELED:
                merged.pop(key, None)
            else:
                merged[key] = lab
        return DayLabelSet(merged)

    def __len__(self) -> int:
        return len(self.labels)


# --------------------------------------------------------------------------
# stream helpers


def _read_text(source: Source) -> str:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    elif data.startswith("﻿"):
        data = data[1:]
    return data


def _rows(source: Source, header: tuple[str, ...]) -> Iterator[tuple[int, list[str]]]:
    """Yield ``(line_number, cells)`` for each non-blank data row."""
    reader = csv.reader(io.StringIO(_read_text(source)))
    seen_header = False
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        cells = [c.strip() for c in row]
        if not seen_header:
            if tuple(c.lower() for c in cells) != header:
                raise ParseError(f"expected header {','.join(header)!r}, got {','.join(cells)!r}", line)
            seen_header = True
            continue
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} columns, got {len(cells)}", line)
        yield line, cells


def _parse_date(text: str, line: int) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise ParseError(f"unparsable date {text!r}", line) from None


def _parse_float(text: str, what: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"unparsable {what} {text!r}", line) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite {what} {text!r}", line)
    return value


# --------------------------------------------------------------------------
# parsers


def parse_production_csv(source: Source) -> tuple[list[ProductionRecord], int]:
    """Parse hourly production rows.

    Returns the records sorted by (facility, date, hour) and the number of
    duplicate keys that were overwritten (last occurrence wins).
    """
    by_key: dict[tuple[str, dt.date, int], ProductionRecord] = {}
    duplicates = 0
    for line, (fid, date_s, hour_s, energy_s) in _rows(source, PRODUCTION_HEADER):
        if not fid:
            raise ParseError("empty facility id", line)
        date = _parse_date(date_s, line)
        try:
            hour = int(hour_s)
        except ValueError:
            raise ParseError(f"unparsable hour {hour_s!r}", line) from None
        if not 0 <= hour < HOURS_PER_DAY:
            raise ParseError(f"hour out of range: {hour}", line)
        energy = _parse_float(energy_s, "energy", line)
        if energy < 0:
            raise ParseError(f"negative energy {energy}", line)
        rec = ProductionRecord(fid, date, hour, energy)
        if rec.key in by_key:
            duplicates += 1
        by_key[rec.key] = rec
    if duplicates:
        logger.warning("%d duplicate production rows overwritten (last write wins)", duplicates)
    return [by_key[k] for k in sorted(by_key)], duplicates


def parse_facility_config(source: Source) -> dict[str, PeakPowerSchedule]:
    """Parse peak-power schedules. Facility order follows first appearance."""
    raw: dict[str, dict[dt.date, float]] = {}
    for line, (fid, date_s, power_s) in _rows(source, CONFIG_HEADER):
        if not fid:
            raise ParseError("empty facility id", line)
        date = _parse_date(date_s, line)
        power = _parse_float(power_s, "peak power", line)
        if power <= 0:
            raise ParseError(f"non-positive peak power {power}", line)
        entries = raw.setdefault(fid, {})
        if date in entries:
            raise ParseError(f"duplicate effective_from {date} for facility {fid}", line)
        entries[date] = power
    return {fid: PeakPowerSchedule(fid, tuple(sorted(e.items()))) for fid, e in raw.items()}


def _parse_labelled(source: Source, vocabulary: Mapping[str, object]) -> dict[tuple[str, dt.date], object]:
    out: dict[tuple[str, dt.date], object] = {}
    for line, (fid, date_s, label_s) in _rows(source, LABEL_HEADER):
        date = _parse_date(date_s, line)
        try:
            value = vocabulary[label_s.lower()]
        except KeyError:
            raise ParseError(f"unknown label {label_s!r}; expected one of {sorted(vocabulary)}", line) from None
        key = (fid, date)
        if key in out and out[key] != value:
            raise ParseError(f"conflicting label for facility {fid} on {date}", line)
        out[key] = value
    return out


def parse_day_labels(source: Source) -> DayLabelSet:
    vocab = {"correct": DayLabel.CORRECT, "incorrect": DayLabel.INCORRECT}
    return DayLabelSet(_parse_labelled(source, vocab))


def parse_alert_labels(source: Source) -> dict[tuple[str, dt.date], bool]:
    """Ground-truth alerts for evaluation: ``label`` in ``{alert, no-alert}``."""
    return _parse_labelled(source, {"alert": True, "no-alert": False})


# --------------------------------------------------------------------------
# writers


def write_production_csv(records: Iterable[ProductionRecord], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(PRODUCTION_HEADER)
    for r in records:
        writer.writerow([r.facility_id, r.date.isoformat(), r.hour, repr(float(r.energy_kwh))])


def write_facility_config(registry: Registry, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CONFIG_HEADER)
    for fid, sched in registry.items():
        for date, power in sched.entries:
            writer.writerow([fid, date.isoformat(), repr(float(power))])


def write_day_labels(labels: DayLabelSet, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(LABEL_HEADER)
    for (fid, date), lab in sorted(labels.labels.items()):
        if lab is not DayLabel.UNLABELED:
            writer.writerow([fid, date.isoformat(), lab.value])


def write_alert_labels(alerts: Mapping[tuple[str, dt.date], bool], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(LABEL_HEADER)
    for (fid, date), alert in sorted(alerts.items()):
        writer.writerow([fid, date.isoformat(), "alert" if alert else "no-alert"])


# --------------------------------------------------------------------------
# daily series


@dataclass(frozen=True, eq=False)
class DailySeries:
    """Hourly production arranged as a dense (facility, day, hour) cube.

    Absent hourly readings are NaN in ``energy``. A (facility, day) pair is
    *present* when it has at least one reading, and *usable* when it has at
    least ``min_hours`` readings; present-but-not-usable days are degenerate.
    """

    facilities: tuple[str, ...]
    dates: tuple[dt.date, ...]
    energy: np.ndarray  # (F, D, 24) kWh, NaN = absent
    min_hours: int
    registry: Registry
    totals: np.ndarray = field(init=False, repr=False)  # (F, D) kWh, NaN unless usable

    def __post_init__(self):
        completeness = np.sum(~np.isnan(self.energy), axis=2)
        totals = np.full(completeness.shape, np.nan)
        for fi, di in zip(*np.nonzero(completeness >= max(self.min_hours, 1))):
            row = self.energy[fi, di]
            totals[fi, di] = math.fsum(row[~np.isnan(row)])
        for arr in (self.energy, totals):
            arr.setflags(write=False)
        object.__setattr__(self, "totals", totals)
        object.__setattr__(self, "_fidx", {f: i for i, f in enumerate(self.facilities)})
        object.__setattr__(self, "_didx", {d: i for i, d in enumerate(self.dates)})

    @property
    def completeness(self) -> np.ndarray:
        return np.sum(~np.isnan(self.energy), axis=2)

    @property
    def present(self) -> np.ndarray:
        return self.completeness > 0

    @property
    def usable(self) -> np.ndarray:
        return ~np.isnan(self.totals)

    def facility_index(self, facility_id: str) -> int:
        try:
            return self._fidx[facility_id]
        except KeyError:
            raise KeyError(f"unknown facility {facility_id!r}") from None

    def date_index(self, date: dt.date) -> int | None:
        return self._didx.get(date)

    def hourly(self, facility_id: str, date: dt.date) -> np.ndarray:
        di = self.date_index(date)
        if di is None:
            return np.full(HOURS_PER_DAY, np.nan)
        return self.energy[self.facility_index(facility_id), di].copy()

    def day_completeness(self, facility_id: str, date: dt.date) -> int:
        return int(np.sum(~np.isnan(self.hourly(facility_id, date))))

    def is_usable(self, facility_id: str, date: dt.date) -> bool:
        di = self.date_index(date)
        return di is not None and bool(self.usable[self.facility_index(facility_id), di])

    def day_total(self, facility_id: str, date: dt.date) -> float | None:
        """Daily energy sum with absent hours counted as zero; None unless usable."""
        di = self.date_index(date)
        if di is None:
            return None
        v = self.totals[self.facility_index(facility_id), di]
        return None if np.isnan(v) else float(v)

    def input_days(self) -> list[tuple[str, dt.date]]:
        fi, di = np.nonzero(self.present)
        return sorted((self.facilities[f], self.dates[d]) for f, d in zip(fi, di))

    def usable_days(self) -> list[tuple[str, dt.date]]:
        fi, di = np.nonzero(self.usable)
        return sorted((self.facilities[f], self.dates[d]) for f, d in zip(fi, di))

    def degenerate_days(self) -> list[tuple[str, dt.date]]:
        fi, di = np.nonzero(self.present & ~self.usable)
        return sorted((self.facilities[f], self.dates[d]) for f, d in zip(fi, di))

    def to_records(self) -> list[ProductionRecord]:
        out = []
        for fi, di, h in zip(*np.nonzero(~np.isnan(self.energy))):
            out.append(ProductionRecord(self.facilities[fi], self.dates[di], int(h),
                                        float(self.energy[fi, di, h])))
        return sorted(out, key=lambda r: r.key)


def build_daily_series(records: Iterable[ProductionRecord], registry: Registry,
                       min_hours: int = DEFAULT_MIN_HOURS) -> DailySeries:
    """Arrange records into a :class:`DailySeries`.

    Facilities follow registry order. Days with fewer than ``min_hours``
    readings are kept in the cube but flagged degenerate (see
    :meth:`DailySeries.degenerate_days`) and never used downstream.
    """
    if not 0 <= min_hours <= HOURS_PER_DAY:
        raise ValueError(f"min_hours must be in [0, 24], got {min_hours}")
    records = list(records)
    facilities = tuple(registry)
    fidx = {f: i for i, f in enumerate(facilities)}
    unknown = sorted({r.facility_id for r in records} - fidx.keys())
    if unknown:
        raise DataError(f"facilities missing from peak-power registry: {', '.join(unknown)}")
    dates = tuple(sorted({r.date for r in records}))
    didx = {d: i for i, d in enumerate(dates)}
    energy = np.full((len(facilities), len(dates), HOURS_PER_DAY), np.nan)
    for r in records:
        energy[fidx[r.facility_id], didx[r.date], r.hour] = r.energy_kwh
    series = DailySeries(facilities, dates, energy, min_hours, registry)
    degenerate = series.degenerate_days()
    if degenerate:
        logger.info("%d degenerate facility-days excluded (< %d hourly readings)", len(degenerate), min_hours)
    return series
