"""
From differences to alerts
==========================

Each day the relative differences are mapped through the learned
membership functions, aggregated per facility with an OWA operator that
ignores the best and worst comparison, turned into a label, and fed to a
small state machine. Alerts are the "should be checked" and "does not work"
states.
"""

import datetime as dt

from pvfleet import ConstantLoss, FacilitySpec, FaultSpec, FleetSpec, assess_range, build_daily_series, \
    generate_fleet, inject_fault, learn_intervals, render_report

facilities = tuple(FacilitySpec(f"I{n}", p, g) for n, p, g in
                   [(1, 47.61, 1.00), (2, 91.125, 1.15), (3, 60.0, 1.05),
                    (4, 72.5, 1.08), (5, 85.0, 0.50), (6, 55.2, 0.90)])
start = dt.date(2020, 1, 1)
spec = FleetSpec(facilities, start, dt.date(2020, 8, 31), seed=7, noise_sd=0.01)
records, labels = generate_fleet(spec)

# one labeled bad day per facility for training
for n, f in enumerate(facilities):
    d = start + dt.timedelta(days=20 + 15 * n)
    records, labels = inject_fault(records, labels, FaultSpec(f.facility_id, ConstantLoss(0.4), d, d))

# I4 starts losing 20% on July 18th
records, labels = inject_fault(records, labels, FaultSpec("I4", ConstantLoss(0.2), dt.date(2020, 7, 18)))

series = build_daily_series(records, spec.registry())
model = learn_intervals(series, labels, end=dt.date(2020, 6, 30))
results = assess_range(model, series, dt.date(2020, 7, 15), dt.date(2020, 7, 20))

# healthy facilities score 1 every day; print the faulted one in full
for a in results:
    print(render_report(a).splitlines()[3])
print(render_report(results[-1]), end="")

# the membership matrix of the first alert day; row I4 is uniformly low
first = next(a for a in results if a.any_alert)
print(first.date, "memberships")
print(first.memberships.round(2))
