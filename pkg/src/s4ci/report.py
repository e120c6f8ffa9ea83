from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Violation:
    check: str
    witness: Any
    detail: str = ""

    def __str__(self):
        s = f"{self.check}: witness {self.witness}"
        return f"{s} ({self.detail})" if self.detail else s


@dataclass
class Report:
    """Collected violations; an empty report means the structure passed."""

    subject: str = ""
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def add(self, check: str, witness: Any, detail: str = "") -> None:
        self.violations.append(Violation(check, witness, detail))

    def extend(self, other: "Report") -> None:
        self.violations.extend(other.violations)

    def lines(self) -> list[str]:
        return [str(v) for v in self.violations]
