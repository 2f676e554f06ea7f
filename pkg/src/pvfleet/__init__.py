"""Comparative fault detection for fleets of co-located photovoltaic facilities.

Facilities are compared against each other day by day, so no weather data
is needed: shared conditions cancel in the relative differences.

- ``ingest``: CSV parsing and the dense daily series
- ``performance``: daily performance and pairwise relative differences
- ``learn``: pairwise anomaly intervals from labeled days
- ``fuzzy``: membership functions, OWA aggregation, linguistic labels
- ``fsm``: facility condition state machine and state file
- ``assess``: daily assessment, reports and plot data
- ``evaluate``: confusion matrices and error rates
- ``simulate``: synthetic fleets with injected faults
"""

__version__ = "0.1.0"

from .assess import (DailyAssessment, FacilityAssessment, Settings, assess_day, assess_range, emit_plot_data,
                     render_report)
from .evaluate import (ConfusionMatrix, ErrorRates, WarningBreakdown, confusion_matrix, error_rates, format_percent,
                       render_matrix, to_alert, warning_adjusted_error, warning_breakdown)
from .fsm import FacilityState, run_trace, step
from .fuzzy import (LabelThresholds, MembershipFunction, OwaWeights, PerformanceLabel, drop_extremes_weights,
                    linguistic_label, membership_eval, owa)
from .ingest import (DailySeries, DayLabel, DayLabelSet, PeakPowerSchedule, ProductionRecord, build_daily_series,
                     parse_day_labels, parse_facility_config, parse_production_csv)
from .learn import IntervalModel, PairInterval, Provenance, learn_intervals
from .performance import (DifferenceMatrix, daily_performance, difference_cube, difference_matrix, performance_table,
                          relative_difference)
from .simulate import (ConstantLoss, FacilitySpec, FaultSpec, FleetSpec, IrregularDips, Outage, generate_fleet,
                       inject_fault)
