"""
A synthetic fleet and its daily performance
===========================================

Six co-located facilities share the same weather, so their daily
performance (energy per unit of peak power) moves together. Differences in
efficiency show up as a stable gap between facilities, and a fault shows up
as that gap changing.
"""

import datetime as dt

import numpy as np

from pvfleet import ConstantLoss, FacilitySpec, FaultSpec, FleetSpec, build_daily_series, generate_fleet, \
    inject_fault, performance_table

facilities = (
    FacilitySpec("I1", 47.61, 1.00),
    FacilitySpec("I2", 91.125, 1.15),
    FacilitySpec("I3", 60.0, 1.05),
    FacilitySpec("I4", 72.5, 1.08),
    FacilitySpec("I5", 85.0, 0.50),
    FacilitySpec("I6", 55.2, 0.90),
)
spec = FleetSpec(facilities, dt.date(2020, 6, 1), dt.date(2020, 6, 30), seed=1, noise_sd=0.01)
records, labels = generate_fleet(spec)
print(f"{len(records)} hourly readings for {len(facilities)} facilities")

# I4 loses a fifth of its output from June 20th on
fault = FaultSpec("I4", ConstantLoss(0.2), dt.date(2020, 6, 20))
records, labels = inject_fault(records, labels, fault)

series = build_daily_series(records, spec.registry())
rho = performance_table(series)

# performance in peak-power hours (rho / 100), one column per facility
print("date        " + "  ".join(f"{f:>5}" for f in series.facilities))
for d, row in zip(series.dates[14:26], rho.T[14:26]):
    print(d.isoformat(), "  ".join(f"{v / 100:5.2f}" for v in row))

# the I4 / I1 ratio drops by exactly the injected loss
ratio = rho[3] / rho[0]
print(f"I4/I1 before: {ratio[:19].mean():.3f}  after: {ratio[19:].mean():.3f}")
print("incorrect days:", sorted(labels.incorrect_days("I4"))[:3], "...")
assert np.allclose(ratio[19:].mean() / ratio[:19].mean(), 0.8, atol=0.01)
