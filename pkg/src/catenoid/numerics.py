"""Bracketed scalar root finding and a Dirichlet Sturm-Liouville eigensolver.

The eigensolver discretizes ``-psi'' + V psi`` on a uniform grid with the
three-point stencil and locates eigenvalues by Sturm-sequence bisection.
The Sturm recurrence is run on ``s_i = h^2 q_i - 1`` instead of the pivots
``q_i`` themselves: the diagonal is ``2/h^2 + V`` and subtracting the shift
from it directly loses about ``log10(1/h^2)`` digits near small eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from scipy.linalg import solve_banded

from .core import GridTooCoarse, InvalidBracket, ModeResult, ModeSource, NoConvergence

try:
    from numba import njit
except ImportError:  # pragma: no cover - pure Python fallback is only slower
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda fn: fn


DEFAULT_GRID_N = 4000
EIG_REL_TOL = 1e-10
EIG_ABS_TOL = 1e-13


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InvalidBracket(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if self.f_lo * self.f_hi > 0.0 or math.isnan(self.f_lo) or math.isnan(self.f_hi):
            raise InvalidBracket(
                f"no sign change on [{self.lo}, {self.hi}]: f = ({self.f_lo}, {self.f_hi})"
            )

    @classmethod
    def around(cls, f: Callable[[float], float], lo: float, hi: float) -> "Bracket":
        return cls(float(lo), float(hi), float(f(lo)), float(f(hi)))


def find_root(
    f: Callable[[float], float],
    bracket: Union[Bracket, Sequence[float]],
    rel_tol: float = 1e-14,
    max_iter: int = 400,
) -> float:
    """Root of ``f`` inside ``bracket``.

    Illinois-weighted secant steps, falling back to bisection whenever two
    consecutive steps fail to halve the bracket. Every iterate stays strictly
    inside the current bracket, so the result is always inside the initial one.
    """
    if not isinstance(bracket, Bracket):
        bracket = Bracket.around(f, *bracket)
    lo, hi, flo, fhi = bracket.lo, bracket.hi, bracket.f_lo, bracket.f_hi
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi

    side = 0  # which end was kept last time: -1 lo, +1 hi
    width_two_ago = width_prev = math.inf
    for _ in range(max_iter):
        width = hi - lo
        x_est = lo if abs(flo) < abs(fhi) else hi
        if width <= rel_tol * max(1.0, abs(x_est)):
            return x_est
        x = hi - fhi * (hi - lo) / (fhi - flo)
        if not (lo < x < hi) or width > 0.5 * width_two_ago:
            x = lo + 0.5 * width
        if not (lo < x < hi):  # bracket is down to adjacent floats
            return x_est
        fx = float(f(x))
        if fx == 0.0:
            return x
        if math.isnan(fx):
            raise NoConvergence(f"f({x}) is NaN")
        if (fx < 0.0) == (flo < 0.0):
            lo, flo = x, fx
            if side == -1:
                fhi *= 0.5
            side = -1
        else:
            hi, fhi = x, fx
            if side == +1:
                flo *= 0.5
            side = +1
        width_two_ago, width_prev = width_prev, width
    raise NoConvergence(f"find_root did not converge in {max_iter} iterations")


def grow_bracket(f, lo: float, start: float, limit: float = 1e6) -> Bracket:
    """Double ``hi`` from ``start`` until ``f`` changes sign relative to ``f(lo)``."""
    f_lo = float(f(lo))
    hi = float(start)
    while True:
        f_hi = float(f(hi))
        if f_lo * f_hi <= 0.0:
            return Bracket(lo, hi, f_lo, f_hi)
        if hi >= limit:
            raise NoConvergence(f"no sign change found on [{lo}, {limit}]")
        hi = min(2.0 * hi, limit)


@dataclass(frozen=True)
class GridSpec:
    """``n`` interior points uniformly spaced strictly inside (lo, hi)."""

    n: int
    lo: float
    hi: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 16:
            raise GridTooCoarse(f"need at least 16 interior points, got {self.n}")
        if not self.hi > self.lo:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / (self.n + 1)

    def interior(self) -> np.ndarray:
        return self.lo + self.h * np.arange(1, self.n + 1)

    def full(self) -> np.ndarray:
        """Interior points plus both endpoints."""
        v = self.lo + self.h * np.arange(self.n + 2)
        v[-1] = self.hi
        return v

    def refined(self) -> "GridSpec":
        """Same interval with h halved."""
        return GridSpec(2 * self.n + 1, self.lo, self.hi)


@njit(cache=True)
def _sturm_count(v, h2, x):
    # Number of eigenvalues of tridiag(-1, 2 + h2*(v - x), -1) / h2 below 0,
    # i.e. eigenvalues of the unscaled operator below x.
    count = 0
    carry = 1.0  # s_{i-1} / (1 + s_{i-1}); s_0 = inf
    tiny = 1e-300
    for i in range(v.shape[0]):
        s = h2 * (v[i] - x) + carry
        t = 1.0 + s
        if t < 0.0:
            count += 1
        elif t == 0.0:
            count += 1
            t = -tiny
        carry = s / t
    return count


def _sample_potential(potential, points: np.ndarray) -> np.ndarray:
    values = np.asarray(potential(points), dtype=float)
    if values.shape != points.shape:
        values = np.array([float(potential(p)) for p in points])
    if not np.all(np.isfinite(values)):
        raise ValueError("potential is not finite on the grid")
    return values


def sturm_count(potential, grid: GridSpec, x: float) -> int:
    """Number of discrete eigenvalues strictly below ``x``."""
    v = _sample_potential(potential, grid.interior())
    return int(_sturm_count(v, grid.h ** 2, float(x)))


def sturm_eigenvalues(
    potential,
    grid: GridSpec,
    n_modes: int,
    rel_tol: float = EIG_REL_TOL,
    abs_tol: float = EIG_ABS_TOL,
) -> list[float]:
    """The ``n_modes`` smallest Dirichlet eigenvalues, increasing."""
    if n_modes > grid.n:
        raise GridTooCoarse(f"{n_modes} modes requested from {grid.n} grid points")
    if n_modes < 1:
        return []
    v = _sample_potential(potential, grid.interior())
    h2 = grid.h ** 2
    # Gershgorin bounds of the unscaled matrix
    lower = float(v.min()) - 1.0
    upper = float(v.max()) + 4.0 / h2 + 1.0

    out = []
    lo_floor = lower
    for j in range(n_modes):
        lo, hi = lo_floor, upper
        for _ in range(2000):
            if hi - lo <= max(rel_tol * max(abs(lo), abs(hi)), abs_tol):
                break
            mid = lo + 0.5 * (hi - lo)
            if mid <= lo or mid >= hi:
                break
            if _sturm_count(v, h2, mid) > j:
                hi = mid
            else:
                lo = mid
        else:  # pragma: no cover
            raise NoConvergence("Sturm bisection did not terminate")
        lam = 0.5 * (lo + hi)
        out.append(lam)
        lo_floor = lo
    return out


def eigenvector_for(
    potential,
    grid: GridSpec,
    eigenvalue: float,
    max_iter: int = 100,
    tol: float = 1e-12,
) -> ModeResult:
    """Inverse iteration for the eigenvector belonging to ``eigenvalue``."""
    v = _sample_potential(potential, grid.interior())
    h2 = grid.h ** 2
    n = grid.n
    # h^2 (T - sigma) in banded storage; nudge the shift off the eigenvalue so
    # the factorization is never exactly singular
    sigma = eigenvalue + 1e-10 * max(1.0, abs(eigenvalue))
    ab = np.empty((3, n))
    ab[0, :] = -1.0
    ab[1, :] = 2.0 + h2 * (v - sigma)
    ab[2, :] = -1.0

    x = np.ones(n)
    x /= np.linalg.norm(x)
    for _ in range(max_iter):
        y = solve_banded((1, 1), ab, x)
        if not np.all(np.isfinite(y)):
            raise NoConvergence("inverse iteration produced non-finite values")
        y /= np.linalg.norm(y)
        if np.dot(y, x) < 0.0:
            y = -y
        if np.linalg.norm(y - x) < tol:
            x = y
            break
        x = y
    else:
        raise NoConvergence(f"inverse iteration did not converge in {max_iter} steps")

    values = np.concatenate(([0.0], x, [0.0]))
    return ModeResult(
        eigenvalue=float(eigenvalue),
        grid=grid.full(),
        values=values,
        source=ModeSource.FINITE_DIFFERENCE,
    )


def apply_operator(potential, grid: GridSpec, values: np.ndarray) -> np.ndarray:
    """Discrete ``-psi'' + V psi`` at interior points; ``values`` includes both endpoints."""
    values = np.asarray(values, dtype=float)
    if values.size != grid.n + 2:
        raise ValueError("values must be sampled on grid.full()")
    v = _sample_potential(potential, grid.interior())
    lap = (values[:-2] - 2.0 * values[1:-1] + values[2:]) / grid.h ** 2
    return -lap + v * values[1:-1]
