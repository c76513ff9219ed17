import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwgkp import ordering
from qwgkp.exceptions import ConvergenceError, SingularityError


def test_lambdas_on_unit_circle():
    l1, l2 = ordering.ordering_lambdas(0.37)
    assert l1 == math.cos(0.37) and l2 == -math.sin(0.37)


def test_decoupled_case_is_exact():
    sol = ordering.solve_pqr_ode(1.0, 0.0, 0.8)
    assert sol.p == pytest.approx(-0.4j, abs=1e-14)
    assert sol.q == 0 and sol.r == 0


def test_boundary_values_and_trajectory():
    sol = ordering.solve_pqr_ode(*ordering.ordering_lambdas(0.3), 1.0)
    assert np.all(sol.trajectory[0, 1:] == 0)
    assert sol.trajectory[-1, 0] == 1
    assert sol.theta_final == -0.5j


def test_ode_rejects_off_circle_lambdas():
    with pytest.raises(ValueError):
        ordering.solve_pqr_ode(1.0, 1.0, 0.5)


def test_step_budget_exhaustion():
    with pytest.raises(ConvergenceError):
        ordering.solve_pqr_ode(*ordering.ordering_lambdas(0.3), 1.0, tol=1e-30, max_steps=64)


def test_trajectory_satisfies_r_equation():
    sol = ordering.solve_pqr_ode(*ordering.ordering_lambdas(0.4), 1.2)
    t, p, _, r = sol.trajectory.T
    dr = np.gradient(r, t.real, edge_order=2) / sol.theta_final
    assert np.allclose(dr[1:-1], sol.lambda2 * np.cos(2 * p[1:-1]), atol=1e-4)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 0.6), st.floats(0.05, 1.5))
def test_solutions_on_imaginary_ray_are_imaginary(phi, zeta):
    for sol in (ordering.solve_pqr_ode(*ordering.ordering_lambdas(phi), zeta), ordering.pqr_perturbative(zeta, phi)):
        assert np.allclose(sol.pqr.real, 0, atol=1e-12)
        assert sol.p.imag < 0 and sol.q.imag <= 0 and sol.r.imag >= 0


def test_perturbative_at_zero_phase():
    sol = ordering.pqr_perturbative(0.9, 0.0)
    assert sol.p == pytest.approx(-0.45j) and sol.q == 0 and sol.r == 0


def test_perturbative_r_is_i_mu():
    zeta, phi = 1.0, 0.3
    mu = 0.5 * math.tan(phi) * math.sinh(zeta * math.cos(phi))
    assert ordering.pqr_perturbative(zeta, phi).r == pytest.approx(1j * mu, abs=1e-15)


def test_perturbative_singularity_and_warning():
    with pytest.raises(SingularityError):
        ordering.pqr_perturbative(1.0, math.pi / 2)
    with pytest.warns(UserWarning):
        ordering.pqr_perturbative(1.0, 1.1)


def test_ode_and_perturbative_agree_at_small_phase():
    ode = ordering.solve_pqr_ode(*ordering.ordering_lambdas(0.1), 1.0)
    pert = ordering.pqr_perturbative(1.0, 0.1)
    assert np.max(np.abs(ode.pqr - pert.pqr)) < 5e-3


@pytest.mark.parametrize("phi", [0.2, 0.1, 0.05])
def test_gap_scales_quadratically(phi):
    def gap(f):
        ode = ordering.solve_pqr_ode(*ordering.ordering_lambdas(f), 1.0)
        return np.max(np.abs(ode.pqr - ordering.pqr_perturbative(1.0, f).pqr))

    assert gap(phi) / gap(phi / 2) == pytest.approx(4.0, rel=0.25)


def test_b_annihilates_vacuum():
    assert ordering.b_vacuum_residual(12) < 1e-14


@pytest.mark.parametrize("zeta,phi", [(0.6, 0.2), (0.6, 0.0), (1.0, 0.5), (0.3, -0.4)])
def test_theorem_holds_with_ode_coefficients(zeta, phi):
    assert ordering.verify_ordering(zeta, phi, 40) < 1e-7


def test_perturbative_residual_grows_with_phase():
    small = ordering.verify_ordering(0.6, 0.1, 40, method="perturbative")
    large = ordering.verify_ordering(0.6, 0.4, 40, method="perturbative")
    assert large > small > 1e-7


def test_verify_ordering_validates_method():
    with pytest.raises(ValueError):
        ordering.verify_ordering(0.6, 0.2, 20, method="euler")
