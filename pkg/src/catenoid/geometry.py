"""Catenoid and Goldschmidt areas, meta-stability, and the tangent construction."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .core import (
    Branch,
    CatenoidSolution,
    Critical,
    Dimensionless,
    FormInconsistency,
    Mismatch,
    NoConvergence,
    OutOfRange,
    RingConfig,
    TwoSolutions,
    to_dimensionless,
)
from .existence import W0, classify, critical_curve_point, critical_distance
from .numerics import Bracket, find_root

FORM_TOL = 1e-10


@dataclass(frozen=True)
class AreaReport:
    a_catenoid: float
    a_goldschmidt: float
    difference: float
    branch: Branch
    f_value: Optional[float] = None

    @classmethod
    def build(cls, a_catenoid: float, a_goldschmidt: float, branch: Branch, f_value=None):
        return cls(a_catenoid, a_goldschmidt, a_catenoid - a_goldschmidt, Branch(branch), f_value)


def _params_of(sol: CatenoidSolution) -> Dimensionless:
    w, b = sol.w, sol.b
    return Dimensionless.from_xi_rho(
        math.sinh(w) * math.sinh(b) / w, math.cosh(w) * math.cosh(b) / w
    )


def _agree(values, tol: float) -> float:
    scale = max(abs(v) for v in values)
    return max(abs(v - values[0]) for v in values) / scale


def catenoid_area_forms(sol: CatenoidSolution, d: float, params: Optional[Dimensionless] = None):
    """Area from the (a, b) form, the (xi, rho, w) form, the (w, b) form and the
    linear-in-(xi, rho) form, in that order."""
    w, b = sol.w, sol.b
    p = params if params is not None else _params_of(sol)
    xi, rho = p.xi, p.rho
    d2 = d * d
    a_d = 1.0 / (2.0 * w)
    integral = math.pi * d2 * (a_d + a_d * a_d * math.sinh(2.0 * w) * math.cosh(2.0 * b))
    mixed = 0.5 * math.pi * d2 * (1.0 / w + rho ** 2 * math.tanh(w) + xi ** 2 / math.tanh(w))
    wb = math.pi * d2 / (4.0 * w * w) * (2.0 * w + math.sinh(2.0 * w) * math.cosh(2.0 * b))
    linear = math.pi * d2 / (2.0 * w) * (
        1.0 + rho * math.sinh(w) * math.cosh(b) + xi * math.cosh(w) * math.sinh(b)
    )
    return integral, mixed, wb, linear


def catenoid_area(
    sol: CatenoidSolution,
    d: float,
    params: Optional[Dimensionless] = None,
    tol: float = FORM_TOL,
) -> float:
    """Surface area of ``sol`` between rings a distance ``d`` apart.

    Pass ``params`` from the rings to make the cross-check independent of the
    solution triple.
    """
    forms = catenoid_area_forms(sol, d, params)
    spread = _agree(forms, 0.0)
    if spread > tol:
        raise FormInconsistency(f"area forms disagree by {spread:.3e} relative: {forms}")
    return forms[2]


def goldschmidt_area_forms(rings: RingConfig, sol: Optional[CatenoidSolution] = None):
    p = to_dimensionless(rings)
    d2 = rings.d ** 2
    forms = [
        math.pi * (rings.r1 ** 2 + rings.r2 ** 2),
        0.5 * math.pi * d2 * (p.rho ** 2 + p.xi ** 2),
    ]
    if sol is not None:
        w, b = sol.w, sol.b
        forms.append(math.pi * d2 / (4 * w * w) * (1.0 + math.cosh(2 * w) * math.cosh(2 * b)))
    return tuple(forms)


def goldschmidt_area(
    rings: RingConfig, sol: Optional[CatenoidSolution] = None, tol: float = FORM_TOL
) -> float:
    """Total area pi (r1^2 + r2^2) of the two disks."""
    forms = goldschmidt_area_forms(rings, sol)
    spread = _agree(forms, 0.0)
    if spread > tol:
        raise FormInconsistency(f"Goldschmidt forms disagree by {spread:.3e}: {forms}")
    return forms[0]


def f_critical(w_c: float) -> float:
    """(A_C - A_G) / (pi d^2 / 2) on the critical curve."""
    if w_c < W0 * (1.0 - 1e-12):
        raise OutOfRange(f"w_c={w_c} is below w0={W0}")
    e = math.exp(-4.0 * w_c)
    # grouped over a common denominator: no cancellation for large w_c
    return (4.0 * w_c * w_c - 3.0 * w_c + 1.0 - e * (w_c + 1.0)) / (4.0 * w_c ** 3)


def scaled_area_difference(b: float, w: float) -> float:
    """(A_C - A_G) / (pi d^2 / 2) for any (b, w)."""
    # cosh(2b) e^{-2w} without overflow
    ce = 0.5 * (math.exp(2.0 * (b - w)) + math.exp(-2.0 * (b + w)))
    return (2.0 * w - 1.0 - ce) / (2.0 * w * w)


class CriticalAreaGap(NamedTuple):
    closed_form: float
    direct: float


def area_difference_on_critical_curve(w_c: float, tol: float = FORM_TOL) -> CriticalAreaGap:
    f = f_critical(w_c)
    point = critical_curve_point(w_c)
    direct = scaled_area_difference(point.b, w_c)
    if abs(f - direct) > tol * max(abs(f), 1e-300):
        raise FormInconsistency(f"f(w_c)={f} but direct difference gives {direct}")
    return CriticalAreaGap(f, direct)


class BranchGap(NamedTuple):
    from_areas: float
    identity: float


def branch_area_gap(
    outer: CatenoidSolution, inner: CatenoidSolution, d: float, tol: float = FORM_TOL
) -> BranchGap:
    """(2 w1 w2 / pi d^2)(A_inner - A_outer) computed two ways."""
    a1 = catenoid_area(outer, d)
    a2 = catenoid_area(inner, d)
    scale = 2.0 * outer.w * inner.w / (math.pi * d * d)
    from_areas = scale * (a2 - a1)
    dw = inner.w - outer.w
    identity = math.sinh(dw) * math.cosh(inner.b - outer.b) - dw
    # the area difference cancels; allow for the rounding of the two areas
    floor = 64 * 2.2e-16 * scale * (a1 + a2)
    if abs(from_areas - identity) > tol * max(abs(identity), abs(from_areas)) + floor:
        raise Mismatch(f"branch gap {from_areas} vs identity {identity}")
    if not (identity > 0.0 and from_areas > -floor):
        raise Mismatch(f"inner area does not exceed outer area: {from_areas}, {identity}")
    return BranchGap(from_areas, identity)


def outer_solution(rings: RingConfig) -> CatenoidSolution:
    result = classify(to_dimensionless(rings), d=rings.d)
    if isinstance(result, TwoSolutions):
        return result.outer
    if isinstance(result, Critical):
        return result.solution
    raise OutOfRange(f"no catenoid spans {rings}")


def outer_area_excess(rings: RingConfig) -> float:
    """A_C(outer) - A_G for the given rings."""
    sol = outer_solution(rings)
    return catenoid_area(sol, rings.d, to_dimensionless(rings)) - goldschmidt_area(rings)


@dataclass(frozen=True)
class Crossover:
    ratio: float
    r1: float
    d_star: float
    d_c: float


def metastability_crossover(ratio: float = 1.0, r1: float = 1.0) -> Crossover:
    """Distance d* at which the outer catenoid and the disks have equal area.

    The radii are held at (r1, ratio * r1) while d grows; d* must precede the
    critical distance.
    """
    if not 0.0 < ratio <= 1.0:
        raise OutOfRange(f"ratio r2/r1 must lie in (0, 1], got {ratio}")
    r2 = ratio * r1
    d_c = critical_distance(r1, r2)
    f = lambda d: outer_area_excess(RingConfig(r1, r2, d))
    lo, hi = 1e-3 * d_c, d_c * (1.0 - 1e-7)
    br = Bracket.around(f, lo, hi)
    d_star = find_root(f, br, rel_tol=1e-13)
    if not d_star < d_c:
        raise NoConvergence(f"crossover d*={d_star} is not below d_c={d_c}")
    return Crossover(ratio, r1, d_star, d_c)


class TangentCheck(NamedTuple):
    projection_sum: float
    a_form: float
    residual: float


def lindelof_tangent_check(sol: CatenoidSolution, d: float) -> TangentCheck:
    """Sum of the boundary tangents' projections on the axis, against d.

    ``residual`` is (projection_sum - d) / d; it vanishes exactly on the critical curve.
    """
    w, b, a = sol.w, sol.b, sol.a
    r1, r2 = sol.radii()
    projection_sum = r1 / math.sinh(w + b) + r2 / math.sinh(w - b)
    a_form = a * (1.0 / math.tanh(w + b) + 1.0 / math.tanh(w - b))
    return TangentCheck(projection_sum, a_form, (projection_sum - d) / d)


def area_report(
    sol: CatenoidSolution, rings: RingConfig, f_value: Optional[float] = None
) -> AreaReport:
    if sol.branch is Branch.CRITICAL:
        # snapped to the tangency point: it solves the rings only to within the band
        a_c = catenoid_area(sol, rings.d)
        a_g = goldschmidt_area(rings)
    else:
        a_c = catenoid_area(sol, rings.d, to_dimensionless(rings))
        a_g = goldschmidt_area(rings, sol)
    return AreaReport.build(a_c, a_g, sol.branch, f_value)
