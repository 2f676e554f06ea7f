"""Daily normalized performance and pairwise relative differences.

The daily performance of a facility is its energy total divided by its peak
power, times 100. Two facilities are compared by the signed gap between their
performances, relative to the larger of the two (also times 100), so the
result lies in [-100, 100] and flips sign when the pair is swapped.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ingest import DailySeries, Registry


class NoPerformanceError(LookupError):
    pass


class UndefinedDifferenceError(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class DailyPerformance:
    facility_id: str
    date: dt.date
    rho: float


@dataclass(frozen=True, eq=False)
class DifferenceMatrix:
    """Relative differences for one day.

    ``cells[i, k]`` compares facility ``i`` against facility ``k``. Invalid
    off-diagonal cells hold NaN; the diagonal is always 0 but is only marked
    valid when the facility itself has a usable day.
    """

    date: dt.date
    facilities: tuple[str, ...]
    cells: np.ndarray
    valid: np.ndarray

    @property
    def n(self) -> int:
        return len(self.facilities)

    def row(self, i: int) -> np.ndarray:
        """Valid off-diagonal values of row ``i``."""
        keep = self.valid[i].copy()
        keep[i] = False
        return self.cells[i, keep]


def daily_performance(facility: str, date: dt.date, series: DailySeries,
                      registry: Registry | None = None) -> DailyPerformance:
    total = series.day_total(facility, date)
    if total is None:
        raise NoPerformanceError(f"no performance available for {facility} on {date}")
    peak = (registry if registry is not None else series.registry)[facility].lookup(date)
    return DailyPerformance(facility, date, total / peak * 100)


def relative_difference(rho_i: float, rho_k: float) -> float:
    top = max(rho_i, rho_k)
    if top == 0:
        raise UndefinedDifferenceError("undefined difference: both performances are zero")
    return (rho_i - rho_k) / top * 100


def _exact_difference(total_i: float, peak_i: float, total_k: float, peak_k: float) -> float | None:
    # Cross-multiplied by peak_i * peak_k > 0 and evaluated on exact integer
    # ratios (int / int division is correctly rounded), so a common scale
    # factor on all energies cancels exactly and cells[i,k] == -cells[k,i].
    ti, di = total_i.as_integer_ratio()
    pi, ei = peak_i.as_integer_ratio()
    tk, dk = total_k.as_integer_ratio()
    pk, ek = peak_k.as_integer_ratio()
    x = ti * pk * dk * ei  # proportional to rho_i
    y = tk * pi * di * ek  # proportional to rho_k
    top = max(x, y)
    if top == 0:
        return None
    return 100 * (x - y) / top


def _day_inputs(series: DailySeries, di: int, fidx: Sequence[int],
                registry: Registry) -> list[tuple[float, float] | None]:
    date = series.dates[di]
    out = []
    for fi in fidx:
        total = series.totals[fi, di]
        if np.isnan(total):
            out.append(None)
        else:
            out.append((float(total), registry[series.facilities[fi]].lookup(date)))
    return out


def _matrix_from_inputs(inputs: list[tuple[float, float] | None]) -> tuple[np.ndarray, np.ndarray]:
    n = len(inputs)
    cells = np.full((n, n), np.nan)
    valid = np.zeros((n, n), dtype=bool)
    np.fill_diagonal(cells, 0.0)
    for i in range(n):
        if inputs[i] is None:
            continue
        valid[i, i] = True
        for k in range(i + 1, n):
            if inputs[k] is None:
                continue
            d = _exact_difference(*inputs[i], *inputs[k])
            if d is None:
                continue
            cells[i, k] = d
            cells[k, i] = -d
            valid[i, k] = valid[k, i] = True
    return cells, valid


def _resolve_facilities(series: DailySeries, facilities: Sequence[str] | None) -> tuple[tuple[str, ...], list[int]]:
    names = tuple(series.facilities if facilities is None else facilities)
    return names, [series.facility_index(f) for f in names]


def difference_matrix(date: dt.date, series: DailySeries, registry: Registry | None = None,
                      facilities: Sequence[str] | None = None) -> DifferenceMatrix:
    """Pairwise relative differences on ``date``; degenerate inputs become masked cells."""
    registry = registry if registry is not None else series.registry
    names, fidx = _resolve_facilities(series, facilities)
    di = series.date_index(date)
    if di is None:
        inputs = [None] * len(names)
    else:
        inputs = _day_inputs(series, di, fidx, registry)
    cells, valid = _matrix_from_inputs(inputs)
    for arr in (cells, valid):
        arr.setflags(write=False)
    return DifferenceMatrix(date, names, cells, valid)


def difference_cube(series: DailySeries, registry: Registry | None = None,
                    facilities: Sequence[str] | None = None) -> np.ndarray:
    """All daily difference matrices stacked as a (days, n, n) array, NaN where invalid.

    Diagonal entries are NaN too, so the cube can be reduced with nan-aware
    functions directly.
    """
    registry = registry if registry is not None else series.registry
    names, fidx = _resolve_facilities(series, facilities)
    cube = np.full((len(series.dates), len(names), len(names)), np.nan)
    for di in range(len(series.dates)):
        cells, valid = _matrix_from_inputs(_day_inputs(series, di, fidx, registry))
        np.fill_diagonal(valid, False)
        cube[di][valid] = cells[valid]
    return cube


def performance_table(series: DailySeries, registry: Registry | None = None) -> np.ndarray:
    """Daily performance for every (facility, day) as a (F, D) array, NaN unless usable."""
    registry = registry if registry is not None else series.registry
    rho = np.full(series.totals.shape, np.nan)
    for fi, di in zip(*np.nonzero(series.usable)):
        peak = registry[series.facilities[fi]].lookup(series.dates[di])
        rho[fi, di] = series.totals[fi, di] / peak * 100
    return rho
