"""Synthetic fleet production with injectable faults.

Every simulated day draws one shared *day factor* that scales all facilities
alike, standing in for the common weather of co-located plants. Facility
output is

    peak_power * efficiency_gain * day_factor * bell(hour) * (1 + noise)

clamped at zero, where ``bell`` is a raised cosine over hours 6..20 peaking
at 13 and ``noise`` is Gaussian per (facility, hour). Randomness comes from
numpy's ``PCG64`` bit generator seeded with ``FleetSpec.seed``; draws are
made day by day in a fixed order (day factor, then a facilities x 24 noise
block) so traces replay exactly.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .ingest import DayLabel, DayLabelSet, PeakPowerSchedule, ProductionRecord

SUNRISE, PEAK, SUNSET = 6, 13, 20


def bell_curve(hour: int) -> float:
    if not SUNRISE <= hour <= SUNSET:
        return 0.0
    return 0.5 * (1.0 + math.cos(math.pi * (hour - PEAK) / (SUNSET - PEAK)))


BELL = np.array([bell_curve(h) for h in range(24)])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _quantize(x, resolution: float | None):
    if resolution is None:
        return x
    return np.round(np.asarray(x) / resolution) * resolution


@dataclass(frozen=True)
class FacilitySpec:
    facility_id: str
    peak_power_kw: float
    efficiency_gain: float = 1.0

    def __post_init__(self):
        if self.peak_power_kw <= 0 or self.efficiency_gain <= 0:
            raise ValueError(f"{self.facility_id}: peak power and gain must be positive")


@dataclass(frozen=True)
class FleetSpec:
    """Simulation parameters.

    ``resolution_kwh`` optionally rounds every hourly value to a meter
    resolution; with a power-of-two resolution, scaling all energies by a
    small-integer factor is exact in floating point.
    """

    facilities: tuple[FacilitySpec, ...]
    start: dt.date
    end: dt.date
    seed: int = 0
    day_factor_range: tuple[float, float] = (0.3, 1.0)
    noise_sd: float = 0.0
    resolution_kwh: float | None = None

    def __post_init__(self):
        lo, hi = self.day_factor_range
        if not 0 < lo <= hi <= 1:
            raise ValueError(f"day_factor_range must satisfy 0 < lo <= hi <= 1, got {self.day_factor_range}")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be non-negative")
        if self.end < self.start:
            raise ValueError("end precedes start")
        if len({f.facility_id for f in self.facilities}) != len(self.facilities):
            raise ValueError("duplicate facility ids")

    @property
    def dates(self) -> list[dt.date]:
        n = (self.end - self.start).days + 1
        return [self.start + dt.timedelta(days=i) for i in range(n)]

    def registry(self) -> dict[str, PeakPowerSchedule]:
        return {f.facility_id: PeakPowerSchedule(f.facility_id, ((self.start, f.peak_power_kw),))
                for f in self.facilities}


def generate_fleet(spec: FleetSpec) -> tuple[list[ProductionRecord], DayLabelSet]:
    """Hourly records for every facility and day, all labeled correct."""
    rng = make_rng(spec.seed)
    lo, hi = spec.day_factor_range
    scale = np.array([f.peak_power_kw * f.efficiency_gain for f in spec.facilities])
    records = []
    labels = {}
    for date in spec.dates:
        day_factor = rng.uniform(lo, hi)
        noise = rng.normal(0.0, spec.noise_sd, size=(len(spec.facilities), 24))
        energy = scale[:, None] * day_factor * BELL[None, :] * (1.0 + noise)
        energy = _quantize(np.maximum(energy, 0.0), spec.resolution_kwh)
        for fi, f in enumerate(spec.facilities):
            labels[f.facility_id, date] = DayLabel.CORRECT
            for h in range(24):
                records.append(ProductionRecord(f.facility_id, date, h, float(energy[fi, h])))
    return records, DayLabelSet(labels)


@dataclass(frozen=True)
class ConstantLoss:
    fraction: float

    def __post_init__(self):
        if not 0 < self.fraction < 1:
            raise ValueError("fraction must lie in (0, 1)")


@dataclass(frozen=True)
class Outage:
    pass


@dataclass(frozen=True)
class IrregularDips:
    """Each day in the window dips by ``depth`` with ``probability``, drawn from ``seed``."""

    probability: float
    depth: float
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.probability <= 1:
            raise ValueError("probability must lie in [0, 1]")
        if not 0 < self.depth < 1:
            raise ValueError("depth must lie in (0, 1)")


FaultKind = Union[ConstantLoss, Outage, IrregularDips]


@dataclass(frozen=True)
class FaultSpec:
    facility_id: str
    kind: FaultKind
    start: dt.date
    end: dt.date | None = None

    def __post_init__(self):
        if self.end is not None and self.end < self.start:
            raise ValueError("fault window end precedes start")

    def window(self, dates: Iterable[dt.date]) -> list[dt.date]:
        return sorted(d for d in set(dates) if d >= self.start and (self.end is None or d <= self.end))


def affected_days(fault: FaultSpec, dates: Iterable[dt.date]) -> list[dt.date]:
    """Days the fault alters, given the dates present in the data."""
    window = fault.window(dates)
    if not isinstance(fault.kind, IrregularDips):
        return window
    draws = make_rng(fault.kind.seed).random(len(window))
    return [d for d, u in zip(window, draws) if u < fault.kind.probability]


def inject_fault(records: Sequence[ProductionRecord], labels: DayLabelSet, fault: FaultSpec,
                 resolution_kwh: float | None = None) -> tuple[list[ProductionRecord], DayLabelSet]:
    """Apply ``fault`` to one facility and relabel the altered days incorrect."""
    if not any(r.facility_id == fault.facility_id for r in records):
        raise KeyError(f"unknown facility {fault.facility_id!r}")
    own_dates = {r.date for r in records if r.facility_id == fault.facility_id}
    hit = set(affected_days(fault, own_dates))
    factor = 0.0 if isinstance(fault.kind, Outage) else 1.0 - (
        fault.kind.fraction if isinstance(fault.kind, ConstantLoss) else fault.kind.depth)
    fid = fault.facility_id
    out = [
        ProductionRecord(fid, r.date, r.hour, float(_quantize(r.energy_kwh * factor, resolution_kwh)))
        if r.date in hit and r.facility_id == fid else r
        for r in records
    ]
    relabeled = labels.relabel({(fault.facility_id, d): DayLabel.INCORRECT for d in hit})
    return out, relabeled
