"""
Learning pairwise intervals from labeled days
=============================================

For every ordered pair of facilities the model learns an interval [a, b]
of relative differences: at or above b the pair looks normal, at or below a
it looks faulty. The interval comes from days a person labeled correct or
incorrect; pairs with awkward evidence get their interval exchanged,
mirrored from the reverse pair, or collapsed to a step.
"""

import datetime as dt

from pvfleet import ConstantLoss, FacilitySpec, FaultSpec, FleetSpec, Provenance, build_daily_series, \
    generate_fleet, inject_fault, learn_intervals

facilities = tuple(FacilitySpec(f"I{n}", p, g) for n, p, g in
                   [(1, 47.61, 1.00), (2, 91.125, 1.15), (3, 60.0, 1.05), (4, 72.5, 1.08)])
spec = FleetSpec(facilities, dt.date(2020, 1, 1), dt.date(2020, 3, 31), seed=4, noise_sd=0.01)
records, labels = generate_fleet(spec)

# a handful of bad days for I1, I3 and I4; I2 is never faulty
for fid, day, loss in [("I1", 10, 0.4), ("I3", 30, 0.3), ("I4", 50, 0.5), ("I1", 70, 0.35)]:
    date = spec.start + dt.timedelta(days=day)
    records, labels = inject_fault(records, labels, FaultSpec(fid, ConstantLoss(loss), date, date))

series = build_daily_series(records, spec.registry())
model = learn_intervals(series, labels)

for (i, k), p in sorted(model.pairs.items()):
    print(f"{i} vs {k}: [{p.a:8.3f}, {p.b:8.3f}]  {p.provenance.value}")

# I2 has no incorrect days, so every I2 row is mirrored from the reverse pair
print(model.provenance_matrix(Provenance.SYMMETRY))

# the model serializes to a small JSON document
print(model.to_json()[:120], "...")
