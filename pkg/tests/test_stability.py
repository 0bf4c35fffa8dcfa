import math

import numpy as np
import pytest
from scipy.optimize import brentq

from catenoid.core import Dimensionless, ModeSource, NotCritical, NotInner, TwoSolutions
from catenoid.existence import W0, classify, critical_w
from catenoid.numerics import GridSpec, apply_operator
from catenoid.stability import (
    StabilityProblem,
    boundary_determinant,
    delta_forms,
    delta_of,
    factorization_partner_check,
    gamma_full,
    gamma_limit,
    ground_eigenvalue,
    k2_equal_rings,
    k2_formulas,
    potential,
    ratio_family_path,
    reduced_determinant,
    spectrum,
    unstable_mode_exact,
    unstable_mode_perturbative,
    unstable_mode_values,
    zero_mode,
    zero_mode_derivative,
    zero_mode_max_location,
    zero_mode_values,
)


def test_potential_values():
    assert potential(-0.7, 0.7) == -2.0
    assert potential(0.0, 0.0) == -2.0
    assert -1e-30 < potential(500.0, 1.0) <= 0.0
    v = np.linspace(-5, 5, 101)
    assert np.allclose(potential(v, 0.3), -2 / np.cosh(v + 0.3) ** 2, rtol=1e-14, atol=0)


# -- delta ----------------------------------------------------------------------

def test_delta_equal_rings():
    assert delta_of(0.0, W0) == 0.0


def test_delta_forms_agree_on_curve():
    w = critical_w(1.0)
    forms = delta_forms(1.0, w)
    ref = delta_of(1.0, w)
    for value in forms.values():
        assert value == pytest.approx(ref, rel=1e-10)


def test_delta_forms_disagree_off_curve():
    forms = delta_forms(1.0, critical_w(1.0) + 0.2)
    assert abs(forms["plus"] - forms["minus"]) > 1e-3
    with pytest.raises(NotCritical):
        delta_of(1.0, critical_w(1.0) + 0.2)


@pytest.mark.parametrize("b", [0.3, 1.0, 2.0])
def test_delta_antisymmetric(b):
    w = critical_w(b)
    assert delta_of(-b, w) == pytest.approx(-delta_of(b, w), rel=1e-15)


# -- zero mode ------------------------------------------------------------------

def test_zero_mode_equal_rings():
    mode = zero_mode(StabilityProblem.on_interval(0.0, W0, 1000))
    expected = 1 - mode.grid * np.tanh(mode.grid)
    assert np.allclose(mode.values, expected, atol=1e-15)
    assert mode.source is ModeSource.ANALYTIC
    assert abs(mode.values[0]) < 1e-15 and abs(mode.values[-1]) < 1e-15


@pytest.mark.parametrize("b", [0.0, 0.25, 0.5, 1.0, 2.0, 4.0])
def test_zero_mode_positive_with_dirichlet_ends(b):
    w = critical_w(b)
    delta = delta_of(b, w)
    v = GridSpec(10_000, -w, w).full()
    psi = zero_mode_values(v, b, delta)
    assert abs(psi[0]) < 1e-12 and abs(psi[-1]) < 1e-12
    assert np.all(psi[1:-1] > 0)
    assert zero_mode_derivative(-w, b, delta) > 0
    assert zero_mode_derivative(w, b, delta) < 0


def test_zero_mode_requires_criticality():
    with pytest.raises(NotCritical):
        zero_mode(StabilityProblem.on_interval(1.0, 1.8))


def test_zero_mode_fd_residual_is_second_order():
    b = 1.0
    w = critical_w(b)
    delta = delta_of(b, w)
    residuals = []
    for n in (500, 1001):
        g = GridSpec(n, -w, w)
        res = apply_operator(lambda v: potential(v, b), g, zero_mode_values(g.full(), b, delta))
        residuals.append(np.max(np.abs(res)))
    assert residuals[0] < 1e-4
    assert residuals[0] / residuals[1] == pytest.approx(4.0, rel=0.05)


def test_zero_mode_max_location_symmetric():
    assert zero_mode_max_location(0.0, 0.0) == 0.0


def test_zero_mode_max_location_asymmetric():
    b = 1.0
    w = critical_w(b)
    delta = delta_of(b, w)
    v_star = zero_mode_max_location(b, delta)
    assert -1.0 < v_star < 0.0
    # five-point stencil derivative
    h = 1e-3
    f = lambda v: float(zero_mode_values(v, b, delta))
    d = (-f(v_star + 2 * h) + 8 * f(v_star + h) - 8 * f(v_star - h) + f(v_star - 2 * h)) / (12 * h)
    assert abs(d) < 1e-10
    v = np.linspace(-w, w, 2001)
    assert f(v_star) >= np.max(zero_mode_values(v, b, delta))


# -- spectra --------------------------------------------------------------------

def test_critical_spectrum_zero():
    assert abs(ground_eigenvalue(0.0, W0)) < 5e-7


@pytest.mark.parametrize("factor, sign", [(0.8, +1), (1.3, -1)])
def test_branch_signs_equal_rings(factor, sign):
    assert sign * ground_eigenvalue(0.0, factor * W0) > 0


def test_ground_state_nodeless_and_gap():
    b = 0.5
    w = critical_w(b) + 0.3
    modes = spectrum(StabilityProblem.on_interval(b, w), 2)
    ground = modes[0].values[1:-1]
    assert np.all(ground > 0)
    assert modes[1].eigenvalue > modes[0].eigenvalue + 1.0
    first = modes[1].values[1:-1]
    assert np.sum(np.diff(np.sign(first[np.abs(first) > 1e-12])) != 0) == 1


def test_spectrum_without_vectors():
    modes = spectrum(StabilityProblem.on_interval(0.0, 1.0, 200), 3, vectors=False)
    assert [m.eigenvalue for m in modes] == sorted(m.eigenvalue for m in modes)


@pytest.mark.parametrize("b", [0.0, 1.0])
def test_lambda0_decreasing_in_width(b):
    ws = critical_w(b) * np.linspace(0.6, 1.6, 8)
    lams = [ground_eigenvalue(b, w, 1500) for w in ws]
    assert all(l2 < l1 for l1, l2 in zip(lams, lams[1:]))


def test_sign_dichotomy_random_points():
    rng = np.random.default_rng(11)
    found = 0
    while found < 10:
        xi = rng.uniform(-2, 2)
        rho = abs(xi) + rng.uniform(0.1, 5)
        result = classify(Dimensionless.from_xi_rho(xi, rho))
        if not isinstance(result, TwoSolutions):
            continue
        found += 1
        assert ground_eigenvalue(result.outer.b, result.outer.w, 1500) > 0
        assert ground_eigenvalue(result.inner.b, result.inner.w, 1500) < 0


@pytest.mark.parametrize("b", [0.0, 1.0])
def test_analytic_vs_fd_zero_mode(b):
    problem = StabilityProblem.on_interval(b, critical_w(b))
    fd = spectrum(problem, 1)[0]
    exact = zero_mode(problem)
    assert np.linalg.norm(fd.values - exact.values) / np.linalg.norm(exact.values) < 1e-4


# -- factorization ------------------------------------------------------------------

def test_factorization_linear_trial():
    b = 1.0
    w = critical_w(b)
    delta = delta_of(b, w)
    reports = [
        factorization_partner_check(StabilityProblem.on_interval(b, w, n), lambda v: -v + delta)
        for n in (400, 801)
    ]
    # J_b L^dag (-v + delta) = 0: residual is pure discretization error
    assert reports[0].intertwining < 1e-3
    assert reports[0].intertwining / reports[1].intertwining == pytest.approx(4.0, rel=0.1)


def test_factorization_gaussian():
    b = 0.4
    f = lambda v: np.exp(-(v - 0.2) ** 2)
    fpp = lambda v: (4 * (v - 0.2) ** 2 - 2) * np.exp(-(v - 0.2) ** 2)
    reports = [
        factorization_partner_check(StabilityProblem.on_interval(b, 2.0, n), f, fpp) for n in (400, 801)
    ]
    for name in ("factorization", "partner", "intertwining"):
        coarse, fine = getattr(reports[0], name), getattr(reports[1], name)
        assert coarse < 1e-3
        assert coarse / fine == pytest.approx(4.0, rel=0.15)


def test_factorization_constant():
    report = factorization_partner_check(StabilityProblem.on_interval(0.3, 1.5, 400), lambda v: 1.0)
    assert report.partner < 10 * report.h ** 2


# -- unstable mode ------------------------------------------------------------------

def test_equal_rings_unstable_mode_reduction():
    w = 1.3 * W0
    mode = unstable_mode_exact(0.0, w)
    k = brentq(lambda k: k - math.tanh(w) * math.tanh(k * w), 1e-3, 0.999, xtol=1e-15)
    assert math.sqrt(mode.k2) == pytest.approx(k, rel=1e-12)
    assert mode.beta == 0.0
    expected = np.cosh(k * mode.grid) - np.tanh(mode.grid) * np.sinh(k * mode.grid) / k
    expected /= expected.max()
    assert np.allclose(mode.values, expected, atol=1e-12)


def test_equal_rings_unstable_mode_matches_fd():
    w = 1.3 * W0
    assert -unstable_mode_exact(0.0, w).k2 == pytest.approx(ground_eigenvalue(0.0, w), abs=1e-5)


@pytest.mark.parametrize("b, eps", [(0.5, 0.3), (1.0, 0.05), (2.0, 1.0)])
def test_unstable_mode_is_dirichlet_eigenfunction(b, eps):
    w = critical_w(b) + eps
    mode = unstable_mode_exact(b, w, n=2000)
    k = math.sqrt(mode.k2)
    ends = unstable_mode_values(np.array([-w, w]), k, mode.beta, b)
    assert np.max(np.abs(ends)) < 1e-10
    g = GridSpec(2000, -w, w)
    res = apply_operator(lambda v: potential(v, b), g, mode.values) + mode.k2 * mode.values[1:-1]
    assert np.max(np.abs(res)) < 1e-5
    assert np.all(mode.values[1:-1] > 0)
    assert mode.k2 == pytest.approx(-ground_eigenvalue(b, w), abs=1e-5)


def test_spurious_unit_root_removed():
    # D(1) = 0 for any (b, w), but the corresponding Psi_k is identically zero
    assert abs(boundary_determinant(1.0, 0.7, 2.5)) < 1e-12
    assert abs(reduced_determinant(1.0, 0.7, 2.5)) > 1e-3
    mode = unstable_mode_exact(0.7, 2.5)
    assert all(abs(k - 1.0) > 1e-3 for k in mode.k_roots)


def test_unstable_mode_rejects_outer_branch():
    with pytest.raises(NotInner):
        unstable_mode_exact(0.0, 0.9 * W0)


@pytest.mark.parametrize("b", [0.0, 1.0])
def test_k_to_zero_recovers_zero_mode(b):
    w = critical_w(b)
    delta = delta_of(b, w)
    v = np.linspace(-w, w, 501)
    psi_k = unstable_mode_values(v, 1e-4, delta, b)
    assert np.max(np.abs(psi_k - zero_mode_values(v, b, delta))) < 1e-7
    # the series branch and the direct formula agree at the switch-over
    above = unstable_mode_values(v, 1.0001e-4, delta, b)
    assert np.max(np.abs(above - psi_k)) < 1e-10


# -- perturbative regime ---------------------------------------------------------------

def test_perturbative_equal_rings():
    pert = unstable_mode_perturbative(lambda eps: 0.0, W0, 0.01)
    assert pert.k2 == pytest.approx(0.03 / W0, rel=1e-15)
    assert pert.k2 == pytest.approx(0.02501, abs=1e-5)
    assert pert.gamma0 == 0.0 and pert.beta == 0.0


def test_equal_rings_closed_form_k2_second_order():
    gaps = []
    for eps in (0.02, 0.01, 0.005):
        gaps.append(abs(k2_equal_rings(W0 + eps) - 3 * eps / W0) / eps ** 2)
    assert max(gaps) < 2 * min(gaps)


def test_relative_k2_error_linear_in_eps():
    path = ratio_family_path(1.0)
    w_c = critical_w(1.0)
    errs = []
    for eps in (0.02, 0.01, 0.005):
        exact = unstable_mode_exact(path(eps), w_c + eps, n=200).k2
        errs.append(abs(exact - 3 * eps / w_c) / exact)
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.15)
    assert errs[1] / errs[2] == pytest.approx(2.0, rel=0.15)


@pytest.mark.parametrize("b", [0.5, 1.0, 2.0])
def test_gamma_identities(b):
    w_c = critical_w(b)
    delta = delta_of(b, w_c)
    pert = unstable_mode_perturbative(ratio_family_path(b), w_c, 0.01)
    assert pert.delta == pytest.approx(delta, rel=1e-12)
    assert pert.gamma0 == pytest.approx(delta * (1 - delta ** 2) / 3, rel=1e-12)
    assert pert.beta == pert.delta + pert.gamma0 * pert.k2
    assert gamma_limit(w_c, delta, -delta / w_c) == pytest.approx(pert.gamma0, rel=1e-12)
    assert pert.k2_plus == pytest.approx(pert.k2_minus, rel=1e-8)


def test_gamma_consistency_off_family():
    # the gamma formula is exactly what equates the two k^2 expressions
    b, w, delta = 0.8, 2.3, 0.4
    g = gamma_full(b, w, delta)
    plus, minus = k2_formulas(b, w, delta, g)
    assert plus == pytest.approx(minus, rel=1e-10)
    plus2, minus2 = k2_formulas(b, w, delta, g + 0.1)
    assert abs(plus2 - minus2) > 1e-3


@pytest.mark.parametrize("b", [0.5, 1.0, 2.0])
def test_b_slope_along_family(b):
    w_c = critical_w(b)
    path = ratio_family_path(b)
    target = -delta_of(b, w_c) / w_c
    errs = [abs((path(eps) - path(0.0)) / eps - target) for eps in (0.02, 0.01)]
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.1)
    assert errs[1] < 0.05 * abs(target) + 1e-12


@pytest.mark.parametrize("b", [0.5, 1.5])
def test_ratio_family_resolves_existence(b):
    # the path is checked by re-solving the boundary conditions
    w_c = critical_w(b)
    path = ratio_family_path(b)
    for eps in (0.05, 0.2):
        w, bb = w_c + eps, path(eps)
        rho = math.cosh(w) * math.cosh(bb) / w
        xi = math.sinh(w) * math.sinh(bb) / w
        result = classify(Dimensionless.from_xi_rho(xi, rho))
        assert isinstance(result, TwoSolutions)
        assert result.inner.w == pytest.approx(w, rel=1e-10)
        assert result.inner.b == pytest.approx(bb, rel=1e-9)
        assert xi / rho == pytest.approx(math.tanh(w_c) * math.tanh(b), rel=1e-12)
