"""Itemised pass/fail reports shared by every checker."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Failure:
    condition: str  # e.g. "M3", "C1'", "span", "R2"
    where: str
    detail: str
    witness: Any = None

    def to_json(self) -> dict:
        out = {"condition": self.condition, "where": self.where, "detail": self.detail}
        if self.witness is not None:
            out["witness"] = self.witness
        return out

    def __str__(self):
        return f"[{self.condition}] {self.where}: {self.detail}"


@dataclass
class Report:
    subject: str
    failures: list[Failure] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.passed

    def fail(self, condition: str, where: str, detail: str, witness: Any = None):
        self.failures.append(Failure(condition, where, detail, witness))

    def conditions(self) -> set[str]:
        return {f.condition for f in self.failures}

    def extend(self, other: "Report"):
        self.failures.extend(other.failures)

    def to_json(self) -> dict:
        out = {"subject": self.subject, "passed": self.passed,
               "failures": [f.to_json() for f in self.failures]}
        if self.info:
            out["info"] = self.info
        return out

    def render(self) -> str:
        head = f"{self.subject}: {'PASS' if self.passed else 'FAIL'}"
        return "\n".join([head] + [f"  {f}" for f in self.failures])
