"""Property-suite reports and their JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any


@dataclass
class PropertyResult:
    passed: bool
    max_violation: float
    witness: Any = None
    checks: int = 0

    def to_dict(self) -> dict:
        out = {"pass": bool(self.passed), "max_violation": float(self.max_violation)}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class PropertyReport:
    """Outcome of a randomized property suite, keyed by property name."""

    tolerance: float
    properties: dict[str, PropertyResult] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties.values())

    @property
    def max_violation(self) -> float:
        return max((p.max_violation for p in self.properties.values()), default=0.0)

    def __getitem__(self, name: str) -> PropertyResult:
        return self.properties[name]

    def record(self, name: str, violation: float, witness: Any = None) -> None:
        """Fold one observed violation (0 means the check held exactly) into `name`."""
        res = self.properties.setdefault(name, PropertyResult(True, 0.0))
        res.checks += 1
        violation = float(max(violation, 0.0))
        if violation > res.max_violation:
            res.max_violation = violation
            if violation > self.tolerance:
                res.witness = witness
        res.passed = res.max_violation <= self.tolerance

    def to_dict(self) -> dict:
        return {name: res.to_dict() for name, res in self.properties.items()}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)
