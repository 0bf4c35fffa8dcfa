"""Shared value types and the physical <-> dimensionless parameter map.

Lengths are plain positive floats. The dimensionless pair is

    xi  = (r1 - r2) / d
    rho = (r1 + r2) / d

with the per-ring variants rho_plus = 2 r1 / d and rho_minus = 2 r2 / d.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np


class CatenoidError(Exception):
    """Base class for every error raised by this package."""


class DegenerateInput(CatenoidError, ValueError):
    pass


class InvalidBracket(CatenoidError, ValueError):
    pass


class GridTooCoarse(CatenoidError, ValueError):
    pass


class NoConvergence(CatenoidError, RuntimeError):
    pass


class InconsistentRoot(CatenoidError, RuntimeError):
    pass


class OutOfRange(CatenoidError, ValueError):
    pass


class NotCritical(CatenoidError, ValueError):
    pass


class NotInner(CatenoidError, ValueError):
    pass


class NoRoot(CatenoidError, RuntimeError):
    pass


class FormInconsistency(CatenoidError, RuntimeError):
    pass


class Mismatch(CatenoidError, RuntimeError):
    pass


class Branch(str, enum.Enum):
    OUTER = "Outer"
    INNER = "Inner"
    CRITICAL = "Critical"


class ModeSource(str, enum.Enum):
    ANALYTIC = "Analytic"
    FINITE_DIFFERENCE = "FiniteDifference"


def _positive_finite(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0.0):
        raise DegenerateInput(f"{name} must be positive and finite, got {value!r}")
    return value


@dataclass(frozen=True)
class RingConfig:
    """Two coaxial rings of radii ``r1`` (at z = +d/2) and ``r2`` (at z = -d/2)."""

    r1: float
    r2: float
    d: float

    def __post_init__(self):
        for name in ("r1", "r2", "d"):
            object.__setattr__(self, name, _positive_finite(name, getattr(self, name)))

    def scaled(self, factor: float) -> "RingConfig":
        return RingConfig(factor * self.r1, factor * self.r2, factor * self.d)


@dataclass(frozen=True)
class Dimensionless:
    xi: float
    rho: float
    rho_plus: float
    rho_minus: float

    @classmethod
    def from_xi_rho(cls, xi: float, rho: float) -> "Dimensionless":
        xi, rho = float(xi), float(rho)
        if not (math.isfinite(xi) and math.isfinite(rho)):
            raise DegenerateInput(f"non-finite parameters xi={xi!r}, rho={rho!r}")
        return cls(xi=xi, rho=rho, rho_plus=rho + xi, rho_minus=rho - xi)

    @property
    def valid(self) -> bool:
        return self.rho > abs(self.xi)

    def canonical(self) -> tuple["Dimensionless", bool]:
        """Reflect to xi >= 0. Returns the reflected parameters and whether a flip happened."""
        if self.xi < 0.0:
            return Dimensionless.from_xi_rho(-self.xi, self.rho), True
        return self, False

    def to_rings(self, d: float = 1.0) -> RingConfig:
        if not self.valid:
            raise DegenerateInput(f"rho={self.rho} must exceed |xi|={abs(self.xi)}")
        return RingConfig(0.5 * d * self.rho_plus, 0.5 * d * self.rho_minus, d)


def to_dimensionless(rings: RingConfig) -> Dimensionless:
    r1, r2, d = rings.r1, rings.r2, rings.d
    return Dimensionless(
        xi=(r1 - r2) / d,
        rho=(r1 + r2) / d,
        rho_plus=2.0 * r1 / d,
        rho_minus=2.0 * r2 / d,
    )


@dataclass(frozen=True)
class CatenoidSolution:
    """One catenoid r(z) = a cosh(z/a + b) with w = d / (2a)."""

    w: float
    b: float
    a: float
    branch: Branch

    @classmethod
    def from_wb(cls, w: float, b: float, branch: Branch, d: float = 1.0) -> "CatenoidSolution":
        return cls(w=float(w), b=float(b), a=d / (2.0 * w), branch=Branch(branch))

    def radii(self) -> tuple[float, float]:
        """Ring radii implied by the solution: (a cosh(w + b), a cosh(w - b))."""
        return self.a * math.cosh(self.w + self.b), self.a * math.cosh(self.w - self.b)

    def boundary_residual(self, rings: RingConfig) -> float:
        r1, r2 = self.radii()
        return max(abs(r1 - rings.r1) / rings.r1, abs(r2 - rings.r2) / rings.r2)


@dataclass(frozen=True)
class NoSolution:
    kind = "NoSolution"


@dataclass(frozen=True)
class Critical:
    solution: CatenoidSolution
    reflected: bool = False
    kind = "Critical"


@dataclass(frozen=True)
class TwoSolutions:
    outer: CatenoidSolution
    inner: CatenoidSolution
    reflected: bool = False
    kind = "TwoSolutions"

    def __post_init__(self):
        if not (self.outer.w < self.inner.w and self.outer.a > self.inner.a):
            raise InconsistentRoot(
                f"branch ordering violated: outer w={self.outer.w}, inner w={self.inner.w}"
            )


ExistenceResult = Union[NoSolution, Critical, TwoSolutions]


@dataclass(frozen=True)
class CriticalPoint:
    b: float
    w_c: float
    delta: float
    xi_c: float
    rho_c: float


@dataclass
class ModeResult:
    """An eigenpair of the stability operator sampled on [lo, hi] including both endpoints."""

    eigenvalue: float
    grid: np.ndarray
    values: np.ndarray
    source: ModeSource
    k2: Optional[float] = None
    beta: Optional[float] = None
    k_roots: tuple = field(default_factory=tuple)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = normalize_mode(np.asarray(self.values, dtype=float))

    def summary(self) -> dict:
        out = {"eigenvalue": self.eigenvalue, "source": self.source.value, "points": int(self.grid.size)}
        if self.k2 is not None:
            out["k2"] = self.k2
        if self.beta is not None:
            out["beta"] = self.beta
        return out


def normalize_mode(values: np.ndarray) -> np.ndarray:
    """Scale to unit max-norm with a positive value at the largest-magnitude sample."""
    if values.size == 0:
        return values
    i = int(np.argmax(np.abs(values)))
    peak = values[i]
    if peak == 0.0:
        return values.copy()
    return values / peak
