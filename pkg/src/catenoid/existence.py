"""Existence and classification of catenoids between two rings.

A ring pair with dimensionless data (xi, rho) is spanned by a catenoid with
parameter w = d / 2a exactly when ``rho * w = h(w)``, where

    h(w) = cosh(w) * sqrt(1 + w^2 xi^2 / sinh^2(w)).

Since h is increasing and convex with h(0) = sqrt(1 + xi^2), the line rho*w
misses, touches, or cuts h twice. The touching configurations form the
critical curve, given in the (b, w) plane by

    2 w = coth(w - b) + coth(w + b).
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import (
    Branch,
    CatenoidSolution,
    Critical,
    CriticalPoint,
    DegenerateInput,
    Dimensionless,
    ExistenceResult,
    InconsistentRoot,
    NoConvergence,
    NoSolution,
    OutOfRange,
    TwoSolutions,
)
from .numerics import Bracket, find_root, grow_bracket

log = logging.getLogger(__name__)

CRITICAL_BAND = 1e-9
ROOT_TOL = 1e-14
W_LIMIT = 1e6
# cosh overflows a double beyond this
W_OVERFLOW = 700.0


def _coth(x: float) -> float:
    return 1.0 / math.tanh(x)


def _sinh_minus_x(x: float) -> float:
    """sinh(x) - x without cancellation for small x."""
    if abs(x) < 0.1:
        x2 = x * x
        return x * x2 * (1 / 6 + x2 * (1 / 120 + x2 * (1 / 5040 + x2 * (1 / 362880))))
    return math.sinh(x) - x


# w0: root of w = coth(w), the critical w of equal rings
W0 = find_root(lambda w: w - _coth(w), (1.0, 2.0), rel_tol=1e-16)
RHO0 = math.cosh(W0) / W0


def h_function(w, xi):
    """h(w) = cosh(w) sqrt(1 + w^2 xi^2 / sinh^2 w); h(0) = sqrt(1 + xi^2)."""
    w_arr = np.asarray(w, dtype=float)
    if np.any(w_arr < 0.0):
        raise ValueError("h is defined for w >= 0")
    safe = np.where(w_arr > 0.0, w_arr, 1.0)
    ratio = np.where(w_arr > 0.0, safe / np.sinh(safe), 1.0)
    out = np.cosh(w_arr) * np.sqrt(1.0 + (ratio * xi) ** 2)
    return float(out) if out.ndim == 0 else out


def _h(w: float, xi: float) -> float:
    # scalar fast path of h_function
    if w == 0.0:
        return math.sqrt(1.0 + xi * xi)
    r = w / math.sinh(w)
    return math.cosh(w) * math.sqrt(1.0 + (r * xi) ** 2)


def h_derivative(w: float, xi: float) -> float:
    """dh/dw, with h'(0) = 0."""
    if w == 0.0:
        return 0.0
    s, c = math.sinh(w), math.cosh(w)
    coth = c / s
    # coth - w/sinh^2 = (sinh cosh - w)/sinh^2 = (sinh(2w) - 2w) / (2 sinh^2)
    k = _sinh_minus_x(2.0 * w) / (2.0 * s * s)
    return (c * s + xi * xi * w * coth * k) / _h(w, xi)


def recover_b(w: float, params: Dimensionless, tol: float = 1e-8) -> float:
    """b from sinh(b) = xi w / sinh(w), checked against cosh(b) = rho w / cosh(w)."""
    b = math.asinh(params.xi * w / math.sinh(w))
    expected = params.rho * w / math.cosh(w)
    if abs(math.cosh(b) - expected) > tol * math.cosh(b):
        raise InconsistentRoot(
            f"w={w} does not solve the boundary conditions: cosh(b)={math.cosh(b)}, "
            f"rho w / cosh w={expected}"
        )
    return b


def classify(
    params: Dimensionless,
    rel_tol: float = ROOT_TOL,
    d: float = 1.0,
    band: float = CRITICAL_BAND,
) -> ExistenceResult:
    """Count and solve the catenoids for ``params``; lengths in ``a`` use ``d``."""
    if not params.rho > abs(params.xi):
        raise DegenerateInput(f"rho={params.rho} must exceed |xi|={abs(params.xi)}")
    canon, reflected = params.canonical()
    xi, rho = canon.xi, canon.rho

    def H(w):
        return _h(w, xi) - rho * w

    def dH(w):
        return h_derivative(w, xi) - rho

    # H'(0) = -rho < 0 and h' grows like e^w, so the minimum is bracketed
    br = grow_bracket(dH, 0.0, 1.0, limit=W_OVERFLOW)
    w_star = find_root(dH, br, rel_tol=rel_tol)
    h_min = H(w_star)
    scale = max(1.0, rho)
    log.debug("classify xi=%r rho=%r: w*=%r H(w*)=%r", xi, rho, w_star, h_min)

    def solution(w, branch):
        b = recover_b(w, params, tol=max(1e-8, 10 * band * scale))
        return CatenoidSolution.from_wb(w, b, branch, d)

    if h_min > band * scale:
        return NoSolution()
    if abs(h_min) <= band * scale:
        return Critical(solution(w_star, Branch.CRITICAL), reflected)

    h_zero = H(0.0)
    upper = grow_bracket(H, w_star, 2.0 * w_star, limit=W_OVERFLOW)
    if not (h_zero > 0.0 and upper.f_hi > 0.0):
        raise InconsistentRoot(
            f"expected H > 0 at both ends of [0, {upper.hi}] around the minimum; "
            f"got {h_zero}, {upper.f_hi}"
        )
    w1 = find_root(H, Bracket(0.0, w_star, h_zero, h_min), rel_tol=rel_tol)
    w2 = find_root(H, upper, rel_tol=rel_tol)
    return TwoSolutions(solution(w1, Branch.OUTER), solution(w2, Branch.INNER), reflected)


def critical_residual(b: float, w: float) -> float:
    """2w - coth(w - |b|) - coth(w + |b|); zero on the critical curve."""
    b = abs(b)
    return 2.0 * w - _coth(w - b) - _coth(w + b)


def critical_w(b: float, rel_tol: float = ROOT_TOL) -> float:
    """The unique w_c > |b| on the critical curve."""
    b = abs(float(b))
    lo = b + 1e-8 * max(1.0, b)
    br = grow_bracket(lambda w: critical_residual(b, w), lo, max(1.0, 2.0 * b), limit=W_LIMIT)
    return find_root(lambda w: critical_residual(b, w), br, rel_tol=rel_tol)


def _w0_gap(w: float) -> float:
    """w - coth(w), clipped at 0 and snapped to 0 within a few ulps of w0."""
    gap = w - _coth(w)
    return 0.0 if gap < 8 * 2.2e-16 * w else gap


def critical_curve_xi_rho(w_c: float) -> tuple[float, float]:
    """(xi_c, rho_c >= 0) of the critical curve at parameter w_c >= w0."""
    if w_c < W0 * (1.0 - 1e-12):
        raise OutOfRange(f"w_c={w_c} is below w0={W0}; xi_c^2 would be negative")
    gap = _w0_gap(w_c)
    w32 = w_c ** 1.5
    rho_c = math.cosh(w_c) ** 2 * math.sqrt(w_c - math.tanh(w_c)) / w32
    xi_c = math.sinh(w_c) ** 2 * math.sqrt(gap) / w32
    return xi_c, rho_c


def critical_curve_point(w_c: float) -> CriticalPoint:
    from .stability import delta_of

    xi_c, rho_c = critical_curve_xi_rho(w_c)
    b = recover_b(w_c, Dimensionless.from_xi_rho(xi_c, rho_c), tol=1e-9)
    return CriticalPoint(b=b, w_c=w_c, delta=delta_of(b, w_c), xi_c=xi_c, rho_c=rho_c)


def jacobian(b: float, w: float) -> float:
    """Jacobian determinant of (b, w) -> (xi, rho); vanishes on the critical curve."""
    cb, sb = math.cosh(b), math.sinh(b)
    cw, sw = math.cosh(w), math.sinh(w)
    return ((cb * sw) ** 2 - (sb * cw) ** 2) / w ** 2 - sw * cw / w ** 3


def jacobian_rho_pm(b: float, w: float) -> float:
    """Jacobian of (b, w) -> (rho_plus, rho_minus); same zero set, simpler form."""
    return (math.sinh(2 * w) - 2 * w * math.sinh(w + b) * math.sinh(w - b)) / w ** 3


def g_function(w_c: float) -> float:
    """xi/rho along the critical curve; increasing from g(w0) = 0 towards 1."""
    if w_c < W0 * (1.0 - 1e-12):
        raise OutOfRange(f"w_c={w_c} is below w0={W0}")
    gap = _w0_gap(w_c)
    return math.tanh(w_c) ** 2 * math.sqrt(gap / (w_c - math.tanh(w_c)))


def g_inverse(ratio: float) -> float:
    """w_c >= w0 with g(w_c) = |ratio|."""
    ratio = abs(float(ratio))
    if ratio == 0.0:
        return W0
    if not ratio < 1.0:
        raise OutOfRange(f"|r1 - r2| / (r1 + r2) = {ratio} must be below 1")
    f = lambda w: g_function(w) - ratio
    br = grow_bracket(f, W0, 2.0, limit=350.0)
    return find_root(f, br, rel_tol=ROOT_TOL)


def critical_distance_from_w(r1: float, r2: float, w_c: float) -> float:
    return (r1 + r2) * w_c ** 1.5 / (math.cosh(w_c) ** 2 * math.sqrt(w_c - math.tanh(w_c)))


def critical_distance(r1: float, r2: float) -> float:
    """Largest ring separation at which a catenoid still exists."""
    if not (r1 > 0 and r2 > 0):
        raise DegenerateInput("radii must be positive")
    w_c = g_inverse((r1 - r2) / (r1 + r2))
    return critical_distance_from_w(r1, r2, w_c)


class Space(str, enum.Enum):
    XI_RHO = "XiRho"
    BW = "BW"


class Region(str, enum.Enum):
    NO_SOLUTION = "NoSolution"
    OUTER = "Outer"
    INNER = "Inner"
    CRITICAL_CURVE = "CriticalCurve"
    TWO_SOLUTIONS = "TwoSolutions"


@dataclass(frozen=True)
class PhaseDiagramRow:
    space: Space
    coord1: float
    coord2: float
    region: Region


def _axis(lo: float, hi: float, steps: int) -> np.ndarray:
    if steps < 2:
        raise ValueError("need at least 2 steps per axis")
    if not hi > lo:
        raise ValueError(f"empty axis [{lo}, {hi}]")
    return np.linspace(lo, hi, steps)


def classify_region(xi: float, rho: float) -> Region:
    # rho <= |xi| is outside the physical domain; rho*w > h(w) is impossible there
    # because h(w) > |xi| w coth(w) > |xi| w.
    if not rho > abs(xi):
        return Region.NO_SOLUTION
    result = classify(Dimensionless.from_xi_rho(xi, rho))
    if isinstance(result, TwoSolutions):
        return Region.TWO_SOLUTIONS
    if isinstance(result, Critical):
        return Region.CRITICAL_CURVE
    return Region.NO_SOLUTION


def bw_region(b: float, w: float) -> Region:
    w_c = critical_w(b)
    if w < w_c:
        return Region.OUTER
    if w > w_c:
        return Region.INNER
    return Region.CRITICAL_CURVE


def phase_grid(
    space: Space,
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    steps: tuple[int, int] = (50, 50),
) -> list[PhaseDiagramRow]:
    """Region labels on a row-major grid (outer loop over the second coordinate)."""
    space = Space(space)
    xs = _axis(*x_range, steps[0])
    ys = _axis(*y_range, steps[1])
    rows = []
    if space is Space.XI_RHO:
        for y in ys:
            for x in xs:
                rows.append(PhaseDiagramRow(space, float(x), float(y), classify_region(x, y)))
    else:
        w_cs = [critical_w(x) for x in xs]
        for y in ys:
            for x, w_c in zip(xs, w_cs):
                region = Region.OUTER if y < w_c else Region.INNER if y > w_c else Region.CRITICAL_CURVE
                rows.append(PhaseDiagramRow(space, float(x), float(y), region))
    return rows


def critical_curve(
    space: Space,
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    points: int = 200,
) -> list[PhaseDiagramRow]:
    """Polyline of the critical curve covering the requested window."""
    space = Space(space)
    if space is Space.BW:
        bs = np.linspace(x_range[0], x_range[1], points)
        return [
            PhaseDiagramRow(space, float(b), critical_w(b), Region.CRITICAL_CURVE) for b in bs
        ]
    # xi_c and rho_c both grow with w_c; stop once the curve has left the window
    x_max, y_max = max(abs(x_range[0]), abs(x_range[1])), max(abs(y_range[0]), abs(y_range[1]))
    w_max = 2.0 * W0
    while True:
        xi_c, rho_c = critical_curve_xi_rho(w_max)
        if (xi_c > x_max and rho_c > y_max) or w_max > 300.0:
            break
        w_max *= 1.5
    rows = []
    for w_c in np.linspace(W0, w_max, points):
        xi_c, rho_c = critical_curve_xi_rho(float(w_c))
        rows.append(PhaseDiagramRow(space, xi_c, rho_c, Region.CRITICAL_CURVE))
    return rows


def phase_diagram(
    space: Space,
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    steps: tuple[int, int] = (50, 50),
    curve_points: int = 200,
) -> list[PhaseDiagramRow]:
    """Grid labels followed by the critical-curve polyline rows."""
    return phase_grid(space, x_range, y_range, steps) + critical_curve(
        space, x_range, y_range, curve_points
    )
