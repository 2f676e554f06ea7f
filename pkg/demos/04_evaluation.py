"""
Evaluating alerts with confusion matrices
=========================================

Predicted alerts are compared with ground truth per facility. Rates whose
denominator is empty print as "0% (undefined)". Days already flagged "no
reason to check" can be read as early warnings rather than misses; the
warning-adjusted error pools what remains across the fleet.
"""

from pvfleet import ConfusionMatrix, WarningBreakdown, error_rates, format_percent, render_matrix, \
    warning_adjusted_error

# counts from a year of operation: (tn, fn, fp, tp)
counts = {
    "I1": (284, 2, 0, 6),
    "I2": (292, 0, 0, 0),
    "I4": (183, 35, 0, 74),
    "I6": (184, 34, 0, 74),
}

for name, (tn, fn, fp, tp) in counts.items():
    print(render_matrix(name, ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)))
    print()

r = error_rates(ConfusionMatrix(tp=6, fp=0, tn=284, fn=2))
print("I1 missed alerts:", format_percent(r.use_error_alert))

# 80 false negatives fleet-wide, of which 66 were already NRC warnings
breakdowns = [WarningBreakdown(2, 0, 0), WarningBreakdown(21, 14, 0),
              WarningBreakdown(9, 0, 0), WarningBreakdown(34, 0, 0)]
print("warning-adjusted error:", format_percent(warning_adjusted_error(breakdowns, 292)))
