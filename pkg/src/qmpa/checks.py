"""Named pass/fail results shared by the diagnostic reports."""
from dataclasses import dataclass, field
from typing import Any, Dict, List


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float
    tol: float
    detail: Dict[str, Any] = field(default_factory=dict)

    def as_dict(self):
        out = {"name": self.name, "passed": bool(self.passed),
               "residual": float(self.residual), "tol": float(self.tol)}
        if self.detail:
            out["detail"] = self.detail
        return out


def check(name, residual, tol, **detail) -> Check:
    return Check(name, bool(residual <= tol), float(residual), float(tol), detail)


def all_passed(checks: List[Check]) -> bool:
    return all(c.passed for c in checks)
