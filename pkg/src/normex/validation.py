"""Structured validation verdicts.

Validators in this package never raise on semantic failure; they return a
verdict listing every check that ran, so callers (and the CLI report) can show
exactly which property broke and by how much.  Checks marked ``advisory`` do
not affect the overall flag: they record conditions that the theory expects
but that the data structure cannot enforce (e.g. unitality of a normal-map
assignment on an empty generator list).
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    detail: str = ""
    advisory: bool = False

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "advisory": self.advisory,
        }


@dataclass
class ValidationVerdict:
    """Outcome of a validator: overall flag plus the individual checks."""

    checks: list[ValidationCheck] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "", *,
            advisory: bool = False) -> None:
        self.checks.append(ValidationCheck(name, passed, detail, advisory))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks if not c.advisory)

    @property
    def failures(self) -> list[ValidationCheck]:
        return [c for c in self.checks if not c.passed and not c.advisory]

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [c.as_dict() for c in self.checks],
        }
