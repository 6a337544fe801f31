"""Exception hierarchy and named-check reports shared across the package."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator


class HopfologicalError(Exception):
    """Base class for every error raised by this package."""


class ContractError(HopfologicalError, ValueError):
    """Inputs violate an operation's preconditions (shapes, bases, fields)."""


class StructuralError(HopfologicalError, ValueError):
    """Data is well-shaped but is not the algebraic object it claims to be."""


class ParameterError(HopfologicalError, ValueError):
    """Invalid parameters for a builtin family or a generator."""


class InternalError(HopfologicalError, RuntimeError):
    """A construction that is guaranteed to succeed did not; an invariant broke upstream."""


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    witness: Any = None

    def __str__(self) -> str:
        status = "pass" if self.passed else "FAIL"
        tail = "" if self.passed or self.witness is None else f"  (witness: {self.witness})"
        return f"{self.name:<32} {status}{tail}"


@dataclass
class Report:
    """Ordered list of named checks; passes iff every check passes."""

    subject: str = ""
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, witness: Any = None) -> Check:
        check = Check(name, bool(passed), None if passed else witness)
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __iter__(self) -> Iterator[Check]:
        return iter(self.checks)

    def __bool__(self) -> bool:
        return self.passed

    def table(self) -> str:
        head = f"== {self.subject} ==" if self.subject else ""
        lines = [head] if head else []
        lines.extend(str(c) for c in self.checks)
        lines.append("PASS" if self.passed else f"FAIL ({len(self.failures())} failing)")
        return "\n".join(lines)
