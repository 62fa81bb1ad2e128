"""Pass/fail bookkeeping shared by the randomized verification suites."""

from __future__ import annotations

from dataclasses import dataclass, field

MAX_RECORDED = 20


@dataclass
class SuiteReport:
    name: str
    cases: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, ok: bool, detail: str) -> None:
        self.cases += 1
        if not ok and len(self.failures) < MAX_RECORDED:
            self.failures.append(detail)

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: {self.cases} checks, {len(self.failures)} failures"

    def record(self) -> dict:
        return {"name": self.name, "ok": self.ok, "checks": self.cases, "failures": self.failures}
