"""Deterministic check reports.

Every checker in the package appends ``ReportEntry`` rows to a ``Report``.
Serialization is canonical (sorted keys, insertion order preserved) so that
identical inputs yield byte-identical report files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"
DEGENERATE = "degenerate"
SKIP = "skip"

_STATUSES = (PASS, FAIL, DEGENERATE, SKIP)


@dataclass(frozen=True)
class ReportEntry:
    check: str
    target: str
    status: str
    witness: Any = None

    def __post_init__(self) -> None:
        if self.status not in _STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    def to_json(self) -> dict:
        data = {"check": self.check, "target": self.target, "status": self.status}
        if self.witness is not None:
            data["witness"] = self.witness
        return data


@dataclass
class Report:
    entries: list[ReportEntry] = field(default_factory=list)

    def add(self, check: str, target: str, status: str, witness: Any = None) -> ReportEntry:
        entry = ReportEntry(check, target, status, witness)
        self.entries.append(entry)
        return entry

    def extend(self, other: "Report") -> None:
        self.entries.extend(other.entries)

    @property
    def failures(self) -> list[ReportEntry]:
        return [e for e in self.entries if e.status == FAIL]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> list[dict]:
        return [e.to_json() for e in self.entries]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    def summary(self) -> str:
        counts: dict[str, int] = {}
        for e in self.entries:
            counts[e.status] = counts.get(e.status, 0) + 1
        parts = [f"{status}={counts[status]}" for status in _STATUSES if status in counts]
        return ", ".join(parts) if parts else "empty"
