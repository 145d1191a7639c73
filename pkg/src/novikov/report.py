"""Verification report records shared by the check engines and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckResult:
    """One verified identity: a stable name, the equation it instantiates,
    pass/fail, and a rendering of the residual (or other detail)."""

    name: str
    equation: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "equation": self.equation,
                "status": "pass" if self.passed else "fail",
                "detail": self.detail}


@dataclass
class Report:
    checks: list[CheckResult] = field(default_factory=list)

    def add(self, name: str, equation: str, passed: bool, detail: str = "") -> CheckResult:
        result = CheckResult(name, equation, passed, detail)
        self.checks.append(result)
        return result

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]
