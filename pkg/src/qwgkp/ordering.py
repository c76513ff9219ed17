"""Operator-ordering theorem for the squeezing part of the interferometer output.

For Hermitian ``A = (A1 - A2)/2``, ``B`` and ``C`` (see
:func:`qwgkp.fock.ordering_operators`) we seek complex ``p, q, r`` with

    exp(theta (l1 A + l2 C)) = exp(p A) exp(r C) exp(q B),   p(0) = q(0) = r(0) = 0.

Differentiating in ``theta`` and using ``[A,B] = 2iC``, ``[A,C] = 2iB``,
``[B,C] = 2iA`` gives

    r' = l2 cos 2p,   i q' cos 2r = l2 sin 2p,   i q' sin 2r = p' - l1.

The system is integrated along the straight ray ``theta = -i t zeta/2``,
``t in [0, 1]``, with classical RK4 and step halving.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import fock
from .exceptions import ConvergenceError, SingularityError


@dataclass(frozen=True)
class OrderingSolution:
    lambda1: float
    lambda2: float
    theta_final: complex
    p: complex
    q: complex
    r: complex
    trajectory: np.ndarray  # columns t, p, q, r
    method: str

    @property
    def pqr(self) -> np.ndarray:
        return np.array([self.p, self.q, self.r])


def ordering_lambdas(phi: float) -> tuple[float, float]:
    """``(l1, l2)`` for the interferometer squeezing term ``cos(phi) A - sin(phi) C``."""
    return math.cos(phi), -math.sin(phi)


def pqr_rhs(y: np.ndarray, lambda1: float, lambda2: float) -> np.ndarray:
    """``d(p, q, r)/d theta``."""
    p, _, r = y
    dr = lambda2 * np.cos(2 * p)
    dq = -1j * lambda2 * np.sin(2 * p) / np.cos(2 * r)
    dp = lambda1 + 1j * dq * np.sin(2 * r)
    return np.array([dp, dq, dr])


def _rk4(theta_final: complex, lambda1: float, lambda2: float, steps: int) -> np.ndarray:
    h = 1.0 / steps
    y = np.zeros(3, dtype=complex)
    path = np.empty((steps + 1, 4), dtype=complex)
    path[0] = [0, *y]

    def f(v):
        return theta_final * pqr_rhs(v, lambda1, lambda2)

    for i in range(steps):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        path[i + 1] = [(i + 1) * h, *y]
    return path


def solve_pqr_ode(
    lambda1: float, lambda2: float, zeta: float, *, tol: float = 1e-10, max_steps: int = 2**18
) -> OrderingSolution:
    """Integrate the ordering ODE from ``theta = 0`` to ``theta = -i zeta/2``.

    The step count doubles until successive endpoints differ by less than
    ``tol``; ConvergenceError is raised if ``max_steps`` is reached first.
    """
    if abs(lambda1**2 + lambda2**2 - 1) > 1e-12:
        raise ValueError("lambda1^2 + lambda2^2 must equal 1")
    theta = -0.5j * zeta
    steps = 16
    prev = _rk4(theta, lambda1, lambda2, steps)
    while True:
        steps *= 2
        if steps > max_steps:
            raise ConvergenceError(f"step halving did not reach tol={tol} within {max_steps} steps")
        cur = _rk4(theta, lambda1, lambda2, steps)
        if np.max(np.abs(cur[-1, 1:] - prev[-1, 1:])) < tol:
            break
        prev = cur
    stride = max(1, steps // 256)
    traj = cur[::stride]
    p, q, r = cur[-1, 1:]
    return OrderingSolution(lambda1, lambda2, theta, complex(p), complex(q), complex(r), traj, "ode")


def _check_phi(phi: float) -> None:
    if abs(math.cos(phi)) < 1e-6:
        raise SingularityError(f"tan(phi) is singular at phi={phi!r}")
    if abs(phi) > 1:
        warnings.warn(f"perturbative ordering solution used at |phi|={abs(phi):.3g} > 1", stacklevel=3)


def pqr_perturbative(zeta: float, phi: float) -> OrderingSolution:
    """First-order-in-``sin(phi)`` solution evaluated at ``theta = -i zeta/2``.

    ``p = -(i zeta/2) cos phi``, ``q = -(i/2) tan phi [cosh(zeta cos phi) - 1]``,
    ``r = (i/2) tan phi sinh(zeta cos phi)``.
    """
    _check_phi(phi)
    l1, l2 = ordering_lambdas(phi)
    theta = -0.5j * zeta
    t = np.linspace(0.0, 1.0, 257)
    th = t * theta
    p = l1 * th
    q = 1j * l2 / (2 * l1) * (np.cos(2 * l1 * th) - 1)
    r = l2 / (2 * l1) * np.sin(2 * l1 * th)
    traj = np.column_stack([t, p, q, r]).astype(complex)
    return OrderingSolution(l1, l2, theta, complex(p[-1]), complex(q[-1]), complex(r[-1]), traj, "perturbative")


def b_vacuum_residual(dim: int) -> float:
    """``|| B |00> ||``, which vanishes identically."""
    ops = fock.ordering_operators((dim, dim))
    return float(np.linalg.norm(ops["B"].matrix @ fock.vacuum((dim, dim)).amplitudes.ravel()))


def ordered_vacuum(solution: OrderingSolution, dims: tuple[int, int]) -> fock.FockState:
    """``exp(pA) exp(rC) exp(qB) |00>`` on the given cutoffs."""
    ops = fock.ordering_operators(dims)
    state = fock.vacuum(dims)
    state = fock.evolve(solution.q * ops["B"].matrix, state)
    state = fock.evolve(solution.r * ops["C"].matrix, state)
    return fock.evolve(solution.p * ops["A"].matrix, state)


def direct_vacuum(zeta: float, phi: float, dims: tuple[int, int]) -> fock.FockState:
    """``exp(theta (l1 A + l2 C)) |00>`` exponentiated as a single generator."""
    ops = fock.ordering_operators(dims)
    l1, l2 = ordering_lambdas(phi)
    gen = -0.5j * zeta * (l1 * ops["A"].matrix + l2 * ops["C"].matrix)
    return fock.evolve(gen, fock.vacuum(dims))


def verify_ordering(zeta: float, phi: float, dim: int, method: str = "ode") -> float:
    """Norm of ``LHS|00> - RHS|00>`` over the interior of a ``dim x dim`` cutoff.

    The left side is computed on a doubled cutoff and serves as the oracle;
    the right side uses ODE (``method="ode"``) or perturbative ordering
    coefficients on ``dim``.
    """
    if method == "ode":
        sol = solve_pqr_ode(*ordering_lambdas(phi), zeta)
    elif method == "perturbative":
        sol = pqr_perturbative(zeta, phi)
    else:
        raise ValueError(f"unknown method {method!r}")
    lhs = direct_vacuum(zeta, phi, (2 * dim, 2 * dim)).amplitudes[:dim, :dim]
    rhs = ordered_vacuum(sol, (dim, dim)).amplitudes
    idx = fock.interior_indices((dim, dim))
    return float(np.linalg.norm((lhs - rhs).ravel()[idx]))
