"""Second-variation operator of the catenoid and its spectrum.

On the interval (-w, w) the stability operator is

    J_b = -d^2/dv^2 - 2 / cosh^2(v + b)

with Dirichlet ends. It factorizes as L^dag L - 1 with L = d/dv + tanh(v + b),
and L L^dag - 1 = -d^2/dv^2, which yields closed-form zero and unstable modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import ModeResult, ModeSource, NoRoot, NotCritical, NotInner
from .existence import critical_residual, critical_w, g_inverse
from .numerics import (
    DEFAULT_GRID_N,
    Bracket,
    GridSpec,
    apply_operator,
    eigenvector_for,
    find_root,
    sturm_eigenvalues,
)

CRITICAL_TOL = 1e-9
K_HI = 2.0
K_SCAN = 400
SERIES_K = 1e-4


def potential(v, b: float):
    """-2 / cosh^2(v + b), written with exp(-2|x|) so it cannot overflow."""
    x = np.abs(np.asarray(v, dtype=float) + b)
    e = np.exp(-2.0 * x)
    out = -8.0 * e / (1.0 + e) ** 2
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class StabilityProblem:
    b: float
    w: float
    grid: GridSpec

    @classmethod
    def on_interval(cls, b: float, w: float, n: int = DEFAULT_GRID_N) -> "StabilityProblem":
        if not w > 0:
            raise ValueError(f"half-width must be positive, got {w}")
        return cls(float(b), float(w), GridSpec(n, -w, w))

    def __post_init__(self):
        if self.grid.lo != -self.w or self.grid.hi != self.w:
            raise ValueError("grid must span (-w, w)")

    def V(self, v):
        return potential(v, self.b)


def _check_critical(b: float, w_c: float, tol: float) -> None:
    if not w_c > abs(b):
        raise NotCritical(f"w={w_c} does not exceed |b|={abs(b)}")
    res = critical_residual(b, w_c)
    if abs(res) > tol * max(1.0, w_c):
        raise NotCritical(f"(b={b}, w={w_c}) is off the critical curve, residual {res:.3e}")


def delta_forms(b: float, w: float) -> dict:
    """All closed-form expressions of the tangent-meeting offset delta.

    They coincide only on the critical curve.
    """
    cp, cm = 1.0 / math.tanh(w + b), 1.0 / math.tanh(w - b)
    return {
        "symmetric": 0.5 * (cm - cp),
        "plus": w - cp,
        "minus": cm - w,
        "sinh": math.sinh(2 * b) / (math.cosh(2 * w) - math.cosh(2 * b)),
    }


def delta_of(b: float, w_c: float, tol: float = CRITICAL_TOL) -> float:
    """delta = (coth(w_c - b) - coth(w_c + b)) / 2 at a critical (b, w_c)."""
    _check_critical(b, w_c, tol)
    cp, cm = 1.0 / math.tanh(w_c + b), 1.0 / math.tanh(w_c - b)
    return 0.5 * (cm - cp)


def zero_mode_values(v, b: float, delta: float):
    """Psi(v) = 1 + (delta - v) tanh(v + b)."""
    v = np.asarray(v, dtype=float)
    return 1.0 + (delta - v) * np.tanh(v + b)


def zero_mode_derivative(v, b: float, delta: float):
    v = np.asarray(v, dtype=float)
    return -np.tanh(v + b) + (delta - v) / np.cosh(v + b) ** 2


def zero_mode(problem: StabilityProblem, tol: float = CRITICAL_TOL) -> ModeResult:
    """Closed-form zero mode of the critical operator, sampled on the full grid."""
    delta = delta_of(problem.b, problem.w, tol)
    v = problem.grid.full()
    return ModeResult(
        eigenvalue=0.0,
        grid=v,
        values=zero_mode_values(v, problem.b, delta),
        source=ModeSource.ANALYTIC,
        k2=0.0,
        beta=delta,
    )


def zero_mode_max_location(b: float, delta: float) -> float:
    """The single stationary point of Psi: sinh(2(v + b)) + 2(v - delta) = 0."""
    f = lambda v: math.sinh(2.0 * (v + b)) + 2.0 * (v - delta)
    # f is increasing; f(delta - b) has the sign of -b and f(-b) that of -(b + delta)
    lo, hi = min(-b, delta - b, delta) - 1.0, max(-b, delta - b, delta) + 1.0
    return find_root(f, Bracket.around(f, lo, hi), rel_tol=1e-15)


def ground_eigenvalue(b: float, w: float, n: int = DEFAULT_GRID_N) -> float:
    problem = StabilityProblem.on_interval(b, w, n)
    return sturm_eigenvalues(problem.V, problem.grid, 1)[0]


def spectrum(problem: StabilityProblem, n_modes: int = 1, vectors: bool = True) -> list[ModeResult]:
    """Lowest ``n_modes`` finite-difference eigenpairs of J_b."""
    eigs = sturm_eigenvalues(problem.V, problem.grid, n_modes)
    if vectors:
        return [eigenvector_for(problem.V, problem.grid, lam) for lam in eigs]
    v = problem.grid.full()
    return [
        ModeResult(lam, v, np.zeros_like(v), ModeSource.FINITE_DIFFERENCE) for lam in eigs
    ]


@dataclass(frozen=True)
class FactorizationReport:
    """Max residuals of the factorization identities on a grid.

    ``factorization``: J_b f vs (L^dag L - 1) f
    ``partner``: (L L^dag - 1) f vs -f''
    ``intertwining``: J_b L^dag f vs L^dag (-f'')
    """

    factorization: float
    partner: float
    intertwining: float
    h: float


def _d(values: np.ndarray, h: float) -> np.ndarray:
    # central first derivative; drops one point at each end
    return (values[2:] - values[:-2]) / (2.0 * h)


def factorization_partner_check(
    problem: StabilityProblem,
    f: Callable,
    fpp: Optional[Callable] = None,
) -> FactorizationReport:
    """Check L^dag L - 1 = J_b and L L^dag - 1 = -d^2 on samples of a smooth ``f``.

    All operators are applied with second-order differences, so residuals are O(h^2).
    ``fpp`` (exact f'') is used for the partner check when given.
    """
    h = problem.grid.h
    v = problem.grid.full()
    fv = np.asarray(f(v), dtype=float) * np.ones_like(v)
    t = np.tanh(v + problem.b)

    def L(vals, sl):  # L applied on points v[1:-1] of the slice
        return _d(vals, h) + t[sl][1:-1] * vals[1:-1]

    def Ld(vals, sl):
        return -_d(vals, h) + t[sl][1:-1] * vals[1:-1]

    def J(vals, sl):
        vv = v[sl][1:-1]
        lap = (vals[:-2] - 2.0 * vals[1:-1] + vals[2:]) / h ** 2
        return -lap + potential(vv, problem.b) * vals[1:-1]

    def free(vals):
        return -(vals[:-2] - 2.0 * vals[1:-1] + vals[2:]) / h ** 2

    full = slice(None)
    inner = slice(1, -1)
    inner2 = slice(2, -2)

    # J_b f vs L^dag L f - f on v[2:-2]
    Lf = L(fv, full)                       # on v[1:-1]
    LdLf = Ld(Lf, inner)                   # on v[2:-2]
    Jf = J(fv, full)[1:-1]
    factorization = np.max(np.abs(Jf - (LdLf - fv[2:-2])))

    # L L^dag f - f vs -f''
    Ldf = Ld(fv, full)
    LLdf = L(Ldf, inner)
    if fpp is not None:
        minus_fpp = -np.asarray(fpp(v[2:-2]), dtype=float) * np.ones(v.size - 4)
    else:
        minus_fpp = free(fv)[1:-1]
    partner = np.max(np.abs(LLdf - fv[2:-2] - minus_fpp))

    # J_b L^dag f vs L^dag(-f'')
    JLdf = J(Ldf, inner)                   # on v[2:-2]
    Ld_free = Ld(free(fv), inner)          # on v[2:-2]
    intertwining = np.max(np.abs(JLdf - Ld_free))
    return FactorizationReport(float(factorization), float(partner), float(intertwining), h)


# -- unstable mode -----------------------------------------------------------

def _sinh_over_k(k: float, v):
    v = np.asarray(v, dtype=float)
    if abs(k) < SERIES_K:
        x2 = (k * v) ** 2
        return v * (1.0 + x2 / 6.0 * (1.0 + x2 / 20.0))
    return np.sinh(k * v) / k


def _mode_parts(k: float, v, b: float):
    """Psi_k = A + beta * B with A, B independent of beta."""
    v = np.asarray(v, dtype=float)
    t = np.tanh(v + b)
    ch = np.cosh(k * v)
    A = ch - t * _sinh_over_k(k, v)
    B = -k * k * _sinh_over_k(k, v) + t * ch
    return A, B


def unstable_mode_values(v, k: float, beta: float, b: float):
    """Psi_k(v) = cosh(kv) - k beta sinh(kv) + tanh(v+b) (beta cosh(kv) - sinh(kv)/k)."""
    A, B = _mode_parts(k, v, b)
    return A + beta * B


def boundary_determinant(k: float, b: float, w: float) -> float:
    """D(k) = A(w) B(-w) - A(-w) B(w); zero iff Psi_k can vanish at both ends."""
    (Ap, Am), (Bp, Bm) = _mode_parts(k, np.array([w, -w]), b)
    return float(Ap * Bm - Am * Bp)


def reduced_determinant(k: float, b: float, w: float) -> float:
    """D(k) / (1 - k^2).

    At k = 1 both A and B are multiples of sech(v + b), the whole-line bound
    state, so D vanishes identically there while Psi_k is the zero function.
    Dividing it out leaves only genuine eigenvalues.
    """
    gap = 1.0 - k * k
    if abs(gap) < 1e-5:
        # interpolate across the removable point
        lo, hi = 1.0 - 1e-5, 1.0 + 1e-5
        f_lo = boundary_determinant(lo, b, w) / (1.0 - lo * lo)
        f_hi = boundary_determinant(hi, b, w) / (1.0 - hi * hi)
        return f_lo + (k - lo) * (f_hi - f_lo) / (hi - lo)
    return boundary_determinant(k, b, w) / gap


def _beta_for(k: float, b: float, w: float) -> float:
    (Ap, Am), (Bp, Bm) = _mode_parts(k, np.array([w, -w]), b)
    beta = -Ap / Bp if abs(Bp) >= abs(Bm) else -Am / Bm
    return float(beta) + 0.0  # no negative zero


def determinant_roots(b: float, w: float, k_hi: float = K_HI, scan: int = K_SCAN) -> list[float]:
    """All sign changes of the reduced determinant on (0, k_hi], refined by root finding."""
    ks = np.linspace(0.0, k_hi, scan + 1)
    ks[0] = 1e-6
    ds = [reduced_determinant(k, b, w) for k in ks]
    roots = []
    for k0, k1, d0, d1 in zip(ks[:-1], ks[1:], ds[:-1], ds[1:]):
        if d0 == 0.0:
            roots.append(float(k0))
        elif d0 * d1 < 0.0:
            roots.append(
                find_root(lambda k: reduced_determinant(k, b, w), Bracket(k0, k1, d0, d1))
            )
    if ds[-1] == 0.0:
        roots.append(float(ks[-1]))
    return roots


def unstable_mode_exact(
    b: float,
    w: float,
    n: int = DEFAULT_GRID_N,
    k_hi: float = K_HI,
) -> ModeResult:
    """Closed-form negative-eigenvalue ground state -k^2 of an inner catenoid.

    Every root of the reduced boundary determinant is a negative eigenvalue
    -k^2; the ground state is the most negative one, i.e. the largest root.
    All roots are reported in ``k_roots``.
    """
    w_c = critical_w(b)
    if not w > w_c:
        raise NotInner(f"w={w} is not beyond the critical w_c={w_c} for b={b}")
    roots = determinant_roots(b, w, k_hi)
    if not roots:
        raise NoRoot(f"boundary determinant has no root in (0, {k_hi}] for b={b}, w={w}")
    k = max(roots)
    beta = _beta_for(k, b, w)
    grid = GridSpec(n, -w, w).full()
    return ModeResult(
        eigenvalue=-k * k,
        grid=grid,
        values=unstable_mode_values(grid, k, beta, b),
        source=ModeSource.ANALYTIC,
        k2=k * k,
        beta=beta,
        k_roots=tuple(roots),
    )


# -- small-epsilon expansion -------------------------------------------------

def ratio_family_b(ratio: float, w: float) -> float:
    """b on the fixed-(r1:r2) family at parameter w, from xi/rho = tanh(w) tanh(b)."""
    return math.atanh(ratio / math.tanh(w))


def ratio_family_path(b_c: float) -> Callable[[float], float]:
    """eps -> b(eps) for rings of fixed radius ratio through the critical point at b_c.

    The ratio xi/rho = tanh(w) tanh(b) is fixed by the radii; w = w_c + eps.
    """
    w_c = critical_w(b_c)
    ratio = math.tanh(w_c) * math.tanh(b_c)
    return lambda eps: ratio_family_b(ratio, w_c + eps)


def ratio_family_from_rings(r1: float, r2: float) -> tuple[float, Callable[[float], float]]:
    """(w_c, eps -> b(eps)) for the fixed-ratio family of a given ring pair."""
    ratio = (r1 - r2) / (r1 + r2)
    w_c = g_inverse(ratio)
    return w_c, lambda eps: ratio_family_b(ratio, w_c + eps)


def gamma_full(b: float, w: float, delta: float) -> float:
    """k^2 coefficient of beta that makes both boundary expansions agree."""
    cp, cm = 1.0 / math.tanh(w + b), 1.0 / math.tanh(w - b)
    num = (
        2.0 * delta * (w * w + 3.0 * cp * cm)
        + (w * w - 3.0 * delta * w - 3.0 * delta ** 2) * cp
        - (w * w + 3.0 * delta * w - 3.0 * delta ** 2) * cm
    )
    return w / 3.0 * num / (cp + cm - 2.0 * w)


def gamma_limit(w_c: float, delta: float, b_prime: float) -> float:
    """epsilon -> 0 limit of ``gamma_full`` for a path with slope b'(0) = ``b_prime``."""
    num = delta * w_c * (w_c ** 2 - 3 * delta ** 2) + (
        w_c ** 4 - 2 * delta ** 2 * w_c ** 2 + 3 * delta ** 4 - w_c ** 2 - 3 * delta ** 2
    ) * b_prime
    return w_c / 3.0 * num / (w_c ** 2 + delta ** 2 - 2 * delta * w_c * b_prime)


def k2_formulas(b: float, w: float, delta: float, gamma: float) -> tuple[float, float]:
    """k^2 from the +w and from the -w boundary condition, to order k^2."""
    cp, cm = 1.0 / math.tanh(w + b), 1.0 / math.tanh(w - b)
    plus = 6 * (cp - w + delta) / (w ** 3 - 3 * delta * w ** 2 - 6 * gamma - 3 * w * (w - 2 * delta) * cp)
    minus = 6 * (cm - w - delta) / (w ** 3 + 3 * delta * w ** 2 + 6 * gamma - 3 * w * (w + 2 * delta) * cm)
    return plus, minus


def k2_equal_rings(w: float) -> float:
    """k^2 for b = 0 from the order-k^2 boundary condition."""
    c = 1.0 / math.tanh(w)
    return 6.0 / w ** 2 * (c - w) / (w - 3.0 * c)


@dataclass(frozen=True)
class PerturbativeMode:
    epsilon: float
    k2: float
    delta: float
    gamma0: float
    beta: float
    gamma: float
    b: float
    w: float
    k2_plus: float
    k2_minus: float


def unstable_mode_perturbative(
    b_path: Callable[[float], float], w_c: float, epsilon: float
) -> PerturbativeMode:
    """Leading-order unstable mode at w = w_c + epsilon along ``b_path``."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    b_c = b_path(0.0)
    delta = delta_of(b_c, w_c)
    k2 = 3.0 * epsilon / w_c
    gamma0 = delta * (1.0 - delta ** 2) / 3.0
    b, w = b_path(epsilon), w_c + epsilon
    gamma = gamma_full(b, w, delta)
    k2_plus, k2_minus = k2_formulas(b, w, delta, gamma)
    return PerturbativeMode(
        epsilon=epsilon,
        k2=k2,
        delta=delta,
        gamma0=gamma0,
        beta=delta + gamma0 * k2,
        gamma=gamma,
        b=b,
        w=w,
        k2_plus=k2_plus,
        k2_minus=k2_minus,
    )
