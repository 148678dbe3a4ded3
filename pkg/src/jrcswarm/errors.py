"""Exception types raised across the package."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


class JrcError(Exception):
    """Base class for all package errors."""


class DegenerateGeometryError(JrcError, ValueError):
    """Two nodes coincide where a positive distance is required."""


class InvalidPowerError(JrcError, ValueError):
    pass


class InfeasibleScenarioError(JrcError):
    pass


class PackingError(JrcError):
    """Target sampling could not honour the minimum separation."""


@dataclass(frozen=True)
class ConfigIssue:
    path: str
    message: str
    got: Any = None
    expected: Any = None

    def __str__(self) -> str:
        text = f"{self.path}: {self.message}"
        if self.got is not None or self.expected is not None:
            text += f" (got {self.got!r}, expected {self.expected})"
        return text


class ConfigError(JrcError, ValueError):
    """Scenario or sweep description failed validation; ``issues`` lists every violation."""

    def __init__(self, issues: list[ConfigIssue]):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))
