"""Shared builders for synthetic test data."""

import datetime as dt

from pvfleet.ingest import PeakPowerSchedule, ProductionRecord, build_daily_series
from pvfleet.simulate import ConstantLoss, FacilitySpec, FaultSpec, FleetSpec, generate_fleet, inject_fault

D0 = dt.date(2020, 1, 1)


def day(n: int) -> dt.date:
    """1-based day number from 2020-01-01."""
    return D0 + dt.timedelta(days=n - 1)


def registry_of(peaks):
    return {f: PeakPowerSchedule(f, ((dt.date(2000, 1, 1), p),)) for f, p in peaks.items()}


def series_from_totals(totals, peaks, hours=24, min_hours=20):
    """Series where each (facility, date) total is spread evenly over ``hours`` readings.

    ``totals`` maps (facility, date) to a daily kWh figure. Totals that are
    multiples of ``hours`` (for ints) keep the sum exact.
    """
    records = []
    for (f, d), total in totals.items():
        records.append(ProductionRecord(f, d, 12, float(total)))
        for h in range(hours - 1):
            records.append(ProductionRecord(f, d, h if h < 12 else h + 1, 0.0))
    return build_daily_series(records, registry_of(peaks), min_hours)


FLEET = (
    FacilitySpec("I1", 47.61, 1.00),
    FacilitySpec("I2", 91.125, 1.15),
    FacilitySpec("I3", 60.0, 1.05),
    FacilitySpec("I4", 72.5, 1.08),
    FacilitySpec("I5", 85.0, 0.50),
    FacilitySpec("I6", 55.2, 0.90),
)

# (facility, day number, loss fraction): ten single-day training faults
TRAINING_FAULTS = (
    ("I1", 20, 0.35), ("I2", 35, 0.40), ("I3", 50, 0.30), ("I4", 65, 0.45), ("I5", 80, 0.35),
    ("I6", 95, 0.40), ("I1", 110, 0.50), ("I3", 125, 0.40), ("I5", 140, 0.30), ("I6", 155, 0.45),
)


def faulted_fleet(seed=7, noise_sd=0.01, fault_facility="I4", fault_fraction=0.2, fault_day=200,
                  resolution_kwh=None, training_faults=TRAINING_FAULTS):
    spec = FleetSpec(FLEET, day(1), day(365), seed=seed, noise_sd=noise_sd, resolution_kwh=resolution_kwh)
    records, labels = generate_fleet(spec)
    for f, n, frac in training_faults:
        records, labels = inject_fault(records, labels, FaultSpec(f, ConstantLoss(frac), day(n), day(n)),
                                       resolution_kwh)
    if fault_facility is not None:
        records, labels = inject_fault(records, labels,
                                       FaultSpec(fault_facility, ConstantLoss(fault_fraction), day(fault_day)),
                                       resolution_kwh)
    return spec, records, labels
