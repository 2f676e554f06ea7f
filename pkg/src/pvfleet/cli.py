"""Command-line entry point.

Subcommands: ``simulate``, ``learn``, ``assess``, ``report``, ``evaluate``
and ``plot-data``. Exit status is 0 on success without alerts, 2 when
``assess`` raised at least one alert, and 1 on error.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import logging
import os
import sys
from typing import Sequence

from . import __version__
from .assess import Settings, assess_range, assessments_from_json, assessments_to_json, emit_plot_data, \
    render_report
from .evaluate import confusion_matrix, render_matrix, report_json, warning_adjusted_error, warning_breakdown
from .ingest import (build_daily_series, parse_alert_labels, parse_day_labels, parse_facility_config,
                     parse_production_csv, write_alert_labels, write_day_labels, write_facility_config,
                     write_production_csv)
from .learn import IntervalModel, learn_intervals
from .simulate import (ConstantLoss, FacilitySpec, FaultSpec, FleetSpec, IrregularDips, Outage, affected_days,
                       generate_fleet, inject_fault)

logger = logging.getLogger("pvfleet")

EXIT_OK, EXIT_ERROR, EXIT_ALERT = 0, 1, 2


def _date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an ISO date: {text!r}") from None


def _settings(args) -> Settings:
    doc = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            doc = json.load(fh)
    for key in ("label_upper", "label_lower", "epsilon", "min_hours", "weight_policy"):
        value = getattr(args, key, None)
        if value is not None:
            doc[key] = value
    return Settings.from_dict(doc)


def _series(args, settings: Settings):
    registry = parse_facility_config(args.facilities)
    records, _ = parse_production_csv(args.production)
    return build_daily_series(records, registry, settings.min_hours)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# --------------------------------------------------------------------------
# subcommands


DEFAULT_FLEET = {
    "facilities": [
        {"id": "I1", "peak_power_kw": 47.61, "efficiency_gain": 1.00},
        {"id": "I2", "peak_power_kw": 91.125, "efficiency_gain": 1.15},
        {"id": "I3", "peak_power_kw": 60.0, "efficiency_gain": 1.05},
        {"id": "I4", "peak_power_kw": 72.5, "efficiency_gain": 1.08},
        {"id": "I5", "peak_power_kw": 85.0, "efficiency_gain": 0.50},
        {"id": "I6", "peak_power_kw": 55.2, "efficiency_gain": 0.90},
    ],
    "start": "2020-01-01",
    "end": "2020-12-30",
    "day_factor_range": [0.3, 1.0],
    "noise_sd": 0.01,
    "faults": [],
}


def _fault_from_dict(doc) -> FaultSpec:
    kind = doc["kind"]
    if kind == "constant_loss":
        k = ConstantLoss(float(doc["fraction"]))
    elif kind == "outage":
        k = Outage()
    elif kind == "irregular_dips":
        k = IrregularDips(float(doc["probability"]), float(doc["depth"]), int(doc.get("seed", 0)))
    else:
        raise ValueError(f"unknown fault kind {kind!r}")
    end = doc.get("to")
    return FaultSpec(doc["facility"], k, _date(doc["from"]), _date(end) if end else None)


def cmd_simulate(args) -> int:
    doc = dict(DEFAULT_FLEET)
    if args.fleet:
        with open(args.fleet, encoding="utf-8") as fh:
            doc.update(json.load(fh))
    spec = FleetSpec(
        facilities=tuple(FacilitySpec(f["id"], float(f["peak_power_kw"]), float(f.get("efficiency_gain", 1.0)))
                         for f in doc["facilities"]),
        start=_date(doc["start"]), end=_date(doc["end"]),
        seed=args.seed if args.seed is not None else int(doc.get("seed", 0)),
        day_factor_range=tuple(doc.get("day_factor_range", (0.3, 1.0))),
        noise_sd=float(doc.get("noise_sd", 0.0)),
        resolution_kwh=doc.get("resolution_kwh"),
    )
    records, labels = generate_fleet(spec)
    alerts = {(f.facility_id, d): False for f in spec.facilities for d in spec.dates}
    for fdoc in doc.get("faults", []):
        fault = _fault_from_dict(fdoc)
        records, labels = inject_fault(records, labels, fault, spec.resolution_kwh)
        for d in affected_days(fault, spec.dates):
            alerts[fault.facility_id, d] = True
    os.makedirs(args.out_dir, exist_ok=True)
    outputs = {
        "production.csv": lambda fh: write_production_csv(records, fh),
        "facilities.csv": lambda fh: write_facility_config(spec.registry(), fh),
        "labels.csv": lambda fh: write_day_labels(labels, fh),
        "alerts.csv": lambda fh: write_alert_labels(alerts, fh),
    }
    for name, writer in outputs.items():
        with open(os.path.join(args.out_dir, name), "w", encoding="utf-8", newline="") as fh:
            writer(fh)
    logger.info("wrote %d records for %d facilities to %s", len(records), len(spec.facilities), args.out_dir)
    return EXIT_OK


def cmd_learn(args) -> int:
    settings = _settings(args)
    series = _series(args, settings)
    labels = parse_day_labels(args.labels)
    model = learn_intervals(series, labels, start=args.date_from, end=args.date_to)
    model.save(args.model)
    return EXIT_OK


def cmd_assess(args) -> int:
    settings = _settings(args)
    series = _series(args, settings)
    model = IntervalModel.load(args.model)
    start = args.date_from or (series.dates[0] if series.dates else dt.date.min)
    end = args.date_to or start
    results = assess_range(model, series, start, end, state_file=args.state, settings=settings)
    if args.out:
        _write(args.out, assessments_to_json(results))
    if not args.quiet:
        sys.stdout.write("".join(render_report(a) for a in results))
    return EXIT_ALERT if any(a.any_alert for a in results) else EXIT_OK


def cmd_report(args) -> int:
    with open(args.assessment, encoding="utf-8") as fh:
        results = assessments_from_json(fh.read())
    _write(args.out, "".join(render_report(a) for a in results))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    with open(args.assessment, encoding="utf-8") as fh:
        results = assessments_from_json(fh.read())
    truth = parse_alert_labels(args.truth)
    facilities = [fa.facility_id for fa in results[0].facilities] if results else []
    matrices, breakdowns = {}, {}
    for f in facilities:
        days = [a for a in results if (f, a.date) in truth]
        states = [a[f].new_state for a in days]
        actual = [truth[f, a.date] for a in days]
        matrices[f] = confusion_matrix([s.alert for s in states], actual)
        breakdowns[f] = warning_breakdown(states, actual)
    n_days = len(results)
    if args.json:
        _write(args.json, report_json(matrices, breakdowns, n_days))
    text = "\n\n".join(render_matrix(f, cm) for f, cm in matrices.items())
    if n_days:
        text += f"\n\nwarning-adjusted error: {warning_adjusted_error(breakdowns.values(), n_days) * 100:.2f}%"
    sys.stdout.write(text + "\n")
    return EXIT_OK


def cmd_plot_data(args) -> int:
    settings = _settings(args)
    series = _series(args, settings)
    if not series.dates:
        _write(args.out, "date,facility,rho\n")
        return EXIT_OK
    start = args.date_from or series.dates[0]
    end = args.date_to or series.dates[-1]
    _write(args.out, emit_plot_data(series, None, start, end))
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pvfleet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def data_args(p):
        p.add_argument("--production", required=True, help="production CSV")
        p.add_argument("--facilities", required=True, help="facility peak-power CSV")

    def window_args(p):
        p.add_argument("--from", dest="date_from", type=_date)
        p.add_argument("--to", dest="date_to", type=_date)

    def config_args(p):
        p.add_argument("--config", help="JSON settings file")
        p.add_argument("--label-upper", type=float)
        p.add_argument("--label-lower", type=float)
        p.add_argument("--epsilon", type=float)
        p.add_argument("--min-hours", type=int)
        p.add_argument("--weight-policy")

    p = sub.add_parser("simulate", help="generate a synthetic fleet")
    p.add_argument("--fleet", help="JSON fleet description (defaults to a six-facility fleet)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("learn", help="learn pairwise intervals from labeled days")
    data_args(p)
    p.add_argument("--labels", required=True)
    p.add_argument("--model", required=True, help="output model JSON")
    window_args(p)
    config_args(p)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("assess", help="assess one day or a range of days")
    data_args(p)
    p.add_argument("--model", required=True)
    p.add_argument("--state", help="state file carried between runs")
    p.add_argument("--out", help="write assessments as JSON")
    p.add_argument("--quiet", action="store_true", help="do not print the report")
    window_args(p)
    config_args(p)
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("report", help="render a stored assessment as text")
    p.add_argument("--assessment", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("evaluate", help="confusion matrices against ground-truth alerts")
    p.add_argument("--assessment", required=True)
    p.add_argument("--truth", required=True, help="label CSV with alert/no-alert")
    p.add_argument("--json", help="write machine-readable report")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("plot-data", help="daily performance CSV for plotting")
    data_args(p)
    p.add_argument("--out")
    window_args(p)
    config_args(p)
    p.set_defaults(func=cmd_plot_data)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, LookupError) as exc:
        logger.error("%s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
