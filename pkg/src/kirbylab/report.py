"""Verification reports shared by the checkers and the script replayer."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

PASS = "checked-pass"
FAIL = "checked-fail"
ASSUMED = "assumed"
IMPORTED = "imported"
WARN = "warning"

OUTCOMES = (PASS, FAIL, ASSUMED, IMPORTED, WARN)


@dataclass(frozen=True)
class Entry:
    outcome: str
    check: str
    detail: str = ""
    line: Optional[int] = None
    statement: str = ""

    def as_dict(self) -> dict:
        return {
            "line": self.line,
            "statement": self.statement,
            "check": self.check,
            "outcome": self.outcome,
            "detail": self.detail,
        }


@dataclass
class Report:
    entries: list[Entry] = field(default_factory=list)

    def add(self, outcome: str, check: str, detail: str = "", line=None, statement: str = "") -> Entry:
        if outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {outcome!r}")
        e = Entry(outcome, check, detail, line, statement)
        self.entries.append(e)
        return e

    def check(self, ok: bool, check: str, detail: str = "", **kw) -> bool:
        self.add(PASS if ok else FAIL, check, detail, **kw)
        return ok

    def absorb(self, other: "Report", line=None, statement: str = "") -> None:
        for e in other.entries:
            self.entries.append(Entry(e.outcome, e.check, e.detail, line, statement))

    @property
    def failures(self) -> list[Entry]:
        return [e for e in self.entries if e.outcome == FAIL]

    @property
    def verified(self) -> bool:
        return not self.failures

    def counts(self) -> dict[str, int]:
        out = {o: 0 for o in OUTCOMES}
        for e in self.entries:
            out[e.outcome] += 1
        return out

    def of(self, outcome: str) -> list[Entry]:
        return [e for e in self.entries if e.outcome == outcome]
