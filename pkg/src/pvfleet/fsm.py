"""Per-facility condition tracking driven by daily performance labels."""

from __future__ import annotations

import datetime as dt
import enum
import json
import os
from typing import Iterable, Mapping, Sequence

from filelock import FileLock

from .fuzzy import PerformanceLabel

STATE_FILE_VERSION = 1


class FacilityState(enum.Enum):
    OK = "OK"
    NRC = "NRC"
    SBC = "SBC"
    KO = "KO"

    @property
    def long_name(self) -> str:
        return _LONG_NAMES[self]

    @property
    def alert(self) -> bool:
        return self in (FacilityState.SBC, FacilityState.KO)


_LONG_NAMES = {
    FacilityState.OK: "works properly",
    FacilityState.NRC: "no reason to check",
    FacilityState.SBC: "should be checked",
    FacilityState.KO: "does not work",
}

INITIAL_STATE = FacilityState.OK

_S, _LA, _A, _VA, _B = (PerformanceLabel.S, PerformanceLabel.LA, PerformanceLabel.A,
                        PerformanceLabel.VA, PerformanceLabel.B)
_OK, _NRC, _SBC, _KO = FacilityState.OK, FacilityState.NRC, FacilityState.SBC, FacilityState.KO

TRANSITIONS: Mapping[tuple[FacilityState, PerformanceLabel], FacilityState] = {
    (_OK, _B): _KO, (_OK, _VA): _SBC, (_OK, _A): _NRC, (_OK, _LA): _NRC, (_OK, _S): _OK,
    (_NRC, _B): _KO, (_NRC, _VA): _SBC, (_NRC, _A): _SBC, (_NRC, _LA): _NRC, (_NRC, _S): _OK,
    (_SBC, _B): _KO, (_SBC, _VA): _KO, (_SBC, _A): _SBC, (_SBC, _LA): _NRC, (_SBC, _S): _OK,
    (_KO, _B): _KO, (_KO, _VA): _KO, (_KO, _A): _KO, (_KO, _LA): _SBC, (_KO, _S): _NRC,
}


def step(current: FacilityState, label: PerformanceLabel) -> FacilityState:
    return TRANSITIONS[current, label]


def run_trace(initial: FacilityState,
              labels: Iterable[PerformanceLabel | None]) -> list[FacilityState]:
    """States after each label; a ``None`` label leaves the state unchanged."""
    state = initial
    out = []
    for label in labels:
        if label is not None:
            state = step(state, label)
        out.append(state)
    return out


class StateStore:
    """JSON file of facility states, one entry per (facility, assessed date).

    Keeping every dated entry, not only the latest, lets a re-run of an
    already assessed range start from the state that preceded it, which makes
    re-runs idempotent.
    """

    def __init__(self, path: str | os.PathLike):
        self.path = os.fspath(path)
        self.lock = FileLock(self.path + ".lock")

    def load(self) -> dict[str, dict[dt.date, FacilityState]]:
        if not os.path.exists(self.path):
            return {}
        with open(self.path, encoding="utf-8") as fh:
            doc = json.load(fh)
        if doc.get("version") != STATE_FILE_VERSION:
            raise ValueError(f"unsupported state file version {doc.get('version')!r}")
        out: dict[str, dict[dt.date, FacilityState]] = {}
        for entry in doc["states"]:
            out.setdefault(entry["facility"], {})[dt.date.fromisoformat(entry["as_of_date"])] = \
                FacilityState(entry["state"])
        return out

    def state_before(self, facilities: Sequence[str], date: dt.date) -> dict[str, FacilityState]:
        """Latest stored state strictly before ``date``; facilities without history start OK."""
        history = self.load()
        prior = {}
        for f in facilities:
            earlier = [d for d in history.get(f, {}) if d < date]
            prior[f] = history[f][max(earlier)] if earlier else INITIAL_STATE
        return prior

    def save(self, history: Mapping[str, Mapping[dt.date, FacilityState]]) -> None:
        entries = [
            {"facility": f, "state": history[f][d].value, "as_of_date": d.isoformat()}
            for f in sorted(history) for d in sorted(history[f])
        ]
        text = json.dumps({"version": STATE_FILE_VERSION, "states": entries}, indent=2) + "\n"
        tmp = self.path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, self.path)

    def record(self, updates: Mapping[str, Mapping[dt.date, FacilityState]]) -> None:
        """Merge dated states into the file, overwriting entries for the same dates."""
        history = self.load()
        for f, dated in updates.items():
            history.setdefault(f, {}).update(dated)
        self.save(history)
