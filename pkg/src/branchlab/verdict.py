"""Three-valued verdicts with machine-checkable certificates.

Every semi-decision in the library returns one of these.  PROVEN and REFUTED
carry a certificate or witness that a test can replay; UNKNOWN_AT_BUDGET
records which budget ran out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class Status(Enum):
    PROVEN = "proven"
    REFUTED = "refuted"
    UNKNOWN_AT_BUDGET = "unknown-at-budget"


@dataclass(frozen=True)
class Verdict:
    status: Status
    certificate: dict[str, Any] = field(default_factory=dict)

    @property
    def is_proven(self) -> bool:
        return self.status is Status.PROVEN

    @property
    def is_refuted(self) -> bool:
        return self.status is Status.REFUTED

    @property
    def is_unknown(self) -> bool:
        return self.status is Status.UNKNOWN_AT_BUDGET

    def exit_code(self) -> int:
        return {Status.PROVEN: 0, Status.REFUTED: 1, Status.UNKNOWN_AT_BUDGET: 2}[self.status]

    def to_json(self) -> dict[str, Any]:
        return {"status": self.status.value, "certificate": self.certificate}

    def __str__(self) -> str:
        return self.status.value


def proven(**certificate: Any) -> Verdict:
    return Verdict(Status.PROVEN, certificate)


def refuted(**certificate: Any) -> Verdict:
    return Verdict(Status.REFUTED, certificate)


def unknown(**certificate: Any) -> Verdict:
    return Verdict(Status.UNKNOWN_AT_BUDGET, certificate)
