"""Itemized pass/fail reports shared by every validator."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .ratlin import Mat, Subspace, fmt


def witness_json(w: Any) -> Any:
    """Render a witness (vectors, tuples, matrices, subspaces) as JSON-ready data."""
    from fractions import Fraction

    if w is None or isinstance(w, (bool, str)):
        return w
    if isinstance(w, int):
        return w
    if isinstance(w, Fraction):
        return fmt(w)
    if isinstance(w, Mat):
        return w.to_json()
    if isinstance(w, Subspace):
        return w.to_json()
    if isinstance(w, dict):
        return {str(k): witness_json(v) for k, v in w.items()}
    if isinstance(w, (list, tuple)):
        return [witness_json(x) for x in w]
    return str(w)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    witness: Any = None

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "witness": witness_json(self.witness)}


@dataclass
class Checks:
    """An ordered list of named checks; ``ok`` iff every check passed."""

    items: list[Check] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, witness: Any = None) -> bool:
        passed = bool(passed)
        if not passed and witness is None:
            witness = "no witness available"
        self.items.append(Check(name, passed, None if passed else witness))
        return passed

    def extend(self, other: "Checks", prefix: str = "") -> None:
        for c in other.items:
            self.items.append(Check(prefix + c.name, c.passed, c.witness))
        for k, v in other.info.items():
            self.info[prefix + k] = v

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.items)

    def __getitem__(self, name: str) -> Check:
        for c in self.items:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(c.name == name for c in self.items)

    def failures(self) -> list[Check]:
        return [c for c in self.items if not c.passed]

    def __bool__(self) -> bool:
        return self.ok

    def __repr__(self) -> str:
        bad = ", ".join(c.name for c in self.failures())
        return f"Checks({len(self.items)} items, ok={self.ok}{'; failing: ' + bad if bad else ''})"
