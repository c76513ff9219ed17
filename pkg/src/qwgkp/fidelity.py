"""Fidelity between the interferometer output and the ideal displaced state.

With a coherent state ``|alpha>`` in port 1 and squeezed vacuum ``S(zeta)|0>``
in port 2, the interferometer output is compared with
``D1(alpha phi/2) S1(zeta)|0> (x) |alpha>``.  Three routes are provided:

* ``fidelity_analytic``: small-``phi`` closed form;
* ``fidelity_ordered``: the ordered operator product behind the closed form,
  evaluated as a Fock-space matrix element;
* ``fidelity_exact``: direct truncated-Fock evolution, no ordering at all.
"""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import fock
from .exceptions import ConvergenceError, SingularityError, TruncationError

logger = logging.getLogger(__name__)

GKP_DISPLACEMENT = math.sqrt(math.pi / 2)
CONVERGENCE_TOLERANCE = 1e-8


@dataclass(frozen=True)
class MziParams:
    """Cat amplitude ``alpha``, interferometer phase ``phi`` and squeezing ``zeta``."""

    alpha: float
    phi: float
    zeta: float

    def __post_init__(self):
        for name, v in asdict(self).items():
            if not np.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, float(v))

    @property
    def alpha_phi(self) -> float:
        return self.alpha * self.phi / 2


@dataclass(frozen=True)
class DerivedParams:
    alpha_c: float
    alpha_s: float
    zeta_c: float
    zeta_s: float
    mu: float
    kappa: float


def derived_params(params: MziParams) -> DerivedParams:
    """Shorthand quantities of the ordered fidelity product.

    ``alpha_c = alpha(1 - cos(phi/2))``, ``alpha_s = alpha(phi/2 - sin(phi/2))``,
    ``zeta_c = zeta cos^2(phi/2)``, ``zeta_s = zeta sin^2(phi/2)``,
    ``mu = tan(phi) sinh(zeta cos phi)/2`` and
    ``kappa = tan(phi) [cosh(zeta cos phi) - 1]/2``.
    """
    a, phi, z = params.alpha, params.phi, params.zeta
    if abs(math.cos(phi)) < 1e-6:
        raise SingularityError(f"tan(phi) is singular at phi={phi!r}")
    t = math.tan(phi)
    zc = z * math.cos(phi)
    return DerivedParams(
        alpha_c=a * (1 - math.cos(phi / 2)),
        alpha_s=a * (phi / 2 - math.sin(phi / 2)),
        zeta_c=z * math.cos(phi / 2) ** 2,
        zeta_s=z * math.sin(phi / 2) ** 2,
        mu=0.5 * t * math.sinh(zc),
        kappa=0.5 * t * (math.cosh(zc) - 1),
    )


def _sech(x: float) -> float:
    return 1.0 / math.cosh(x)


def fidelity_analytic(params: MziParams) -> float:
    """Small-``phi`` closed-form fidelity.

    ``F = sech(mu) sech(zeta_s) exp{-e^zeta sech(zeta_s) (alpha_s^2 e^{zeta_c} + alpha_c^2 e^{-zeta_c}) / 2}
    * exp{-alpha_c sech^2(zeta_c) tanh(mu) (alpha_c tanh(zeta_s) tanh(mu) - 2 alpha_s e^zeta) / 2}``.

    Valid for ``|phi| <~ 1``; a warning is issued beyond that.
    """
    if abs(params.phi) > 1:
        warnings.warn(f"closed-form fidelity used at |phi|={abs(params.phi):.3g} > 1", stacklevel=2)
    g = derived_params(params)
    ez = math.exp(params.zeta)
    tmu = math.tanh(g.mu)
    e1 = -0.5 * ez * _sech(g.zeta_s) * (g.alpha_s**2 * math.exp(g.zeta_c) + g.alpha_c**2 * math.exp(-g.zeta_c))
    e2 = -0.5 * g.alpha_c * _sech(g.zeta_c) ** 2 * tmu * (g.alpha_c * math.tanh(g.zeta_s) * tmu - 2 * g.alpha_s * ez)
    return _sech(g.mu) * _sech(g.zeta_s) * math.exp(e1 + e2)


def default_dims(params: MziParams) -> tuple[int, int]:
    """Cutoffs for the (squeezed signal, coherent ancilla) pair of output modes."""
    shift = abs(params.alpha) * max(abs(math.sin(params.phi / 2)), abs(params.phi) / 2)
    d1 = fock.suggest_dim(shift, params.zeta)
    d2 = fock.suggest_dim(params.alpha, params.zeta * math.sin(params.phi / 2) ** 2)
    return d1, d2


def _resolve_dims(params: MziParams, dim) -> tuple[int, int]:
    if dim is None:
        return default_dims(params)
    if np.isscalar(dim):
        return int(dim), int(dim)
    d1, d2 = dim
    return int(d1), int(d2)


def _check_tail(state: fock.FockState, label: str) -> fock.FockState:
    if state.tail_flagged:
        raise TruncationError(f"{label}: tail mass {state.tail_mass:.3g} at dims {state.dims}")
    return state


def output_state(params: MziParams, dims: tuple[int, int]) -> fock.FockState:
    """Exact interferometer output for ``|alpha> (x) S(zeta)|0>``.

    ``D1(alpha sin(phi/2)) D2(alpha cos(phi/2)) exp(-zeta/2 b^dag^2 + zeta/2 b^2)|00>``
    with ``b = cos(phi/2) a1 - sin(phi/2) a2``.
    """
    s, c = math.sin(params.phi / 2), math.cos(params.phi / 2)
    a1, a2 = fock.two_mode_ladders(dims)
    b = c * a1 - s * a2
    bd = b.conj().T
    gen = (-0.5 * params.zeta) * (bd @ bd) + (0.5 * params.zeta) * (b @ b)
    state = fock.evolve(gen.tocsr(), fock.vacuum(dims))
    state = fock.apply_local(fock.displacement_operator(params.alpha * s, dims[0]), state, 0)
    state = fock.apply_local(fock.displacement_operator(params.alpha * c, dims[1]), state, 1)
    return _check_tail(state, "output state")


def target_state(params: MziParams, dims: tuple[int, int]) -> fock.FockState:
    """``D1(alpha phi/2) S1(zeta)|0> (x) |alpha>``."""
    d1, d2 = dims
    m1 = fock.apply(fock.squeeze_operator(params.zeta, d1), fock.vacuum(d1))
    m1 = fock.apply(fock.displacement_operator(params.alpha_phi, d1), m1)
    m2 = fock.apply(fock.displacement_operator(params.alpha, d2), fock.vacuum(d2))
    return _check_tail(fock.tensor(m1, m2), "target state")


def exact_overlap(params: MziParams, dim=None) -> complex:
    """``<Psi_displ|Psi_out>`` including its phase."""
    dims = _resolve_dims(params, dim)
    return fock.overlap(target_state(params, dims), output_state(params, dims))


def fidelity_exact(params: MziParams, dim=None, *, check_convergence: bool = False) -> float:
    """``|<Psi_displ|Psi_out>|`` from truncated-Fock evolution.

    ``dim`` is an int (both modes), a pair, or ``None`` for defaults.  With
    ``check_convergence`` the value is recomputed at doubled cutoffs and
    ConvergenceError is raised if the two differ by more than 1e-8.
    """
    dims = _resolve_dims(params, dim)
    ov = exact_overlap(params, dims)
    logger.debug("overlap phase %.3e rad at %s", np.angle(ov), params)
    f = abs(ov)
    if check_convergence:
        f2 = abs(exact_overlap(params, (2 * dims[0], 2 * dims[1])))
        if abs(f2 - f) > CONVERGENCE_TOLERANCE:
            raise ConvergenceError(f"fidelity changed by {abs(f2 - f):.3g} under cutoff doubling")
    return float(min(f, 1.0))


def fidelity_ordered(params: MziParams, dim=None) -> float:
    """Fock-space value of the ordered product underlying the closed form.

    ``|<00| S1(zeta)^dag D1(-alpha_s) D2(-alpha_c) S1(zeta_c) S2(zeta_s)
    exp{mu (a1^dag a2^dag - a1 a2)} exp{kappa (a1^dag a2 - a1 a2^dag)} |00>|``
    """
    g = derived_params(params)
    dims = _resolve_dims(params, dim)
    a1, a2 = fock.two_mode_ladders(dims)
    a1d, a2d = a1.conj().T, a2.conj().T
    ket = fock.vacuum(dims)
    ket = fock.evolve((g.kappa * (a1d @ a2 - a1 @ a2d)).tocsr(), ket)
    ket = fock.evolve((g.mu * (a1d @ a2d - a1 @ a2)).tocsr(), ket)
    ket = fock.apply_local(fock.squeeze_operator(g.zeta_s, dims[1]), ket, 1)
    ket = fock.apply_local(fock.squeeze_operator(g.zeta_c, dims[0]), ket, 0)
    ket = fock.apply_local(fock.displacement_operator(-g.alpha_c, dims[1]), ket, 1)
    ket = fock.apply_local(fock.displacement_operator(-g.alpha_s, dims[0]), ket, 0)
    _check_tail(ket, "ordered state")
    bra = fock.tensor(fock.apply(fock.squeeze_operator(params.zeta, dims[0]), fock.vacuum(dims[0])), fock.vacuum(dims[1]))
    return float(min(abs(fock.overlap(bra, ket)), 1.0))


def squeezing_db(zeta: float) -> float:
    """Quadrature noise reduction ``20 zeta log10(e)`` in dB."""
    return 20.0 * zeta * math.log10(math.e)


def zeta_for_runs(n_runs: int) -> float:
    """Squeezing ``ln(N pi)/2`` that makes each N-run codeword peak GKP-sized."""
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    return 0.5 * math.log(n_runs * math.pi)


def gkp_alpha(phi: float) -> float:
    """Cat amplitude on the GKP line ``alpha phi/2 = sqrt(pi/2)``."""
    return 2.0 * GKP_DISPLACEMENT / phi


def codeword_fidelity_estimate(f_mzi: float, n_runs: int, depth: int = 1) -> float:
    """``F^{M N}``: codeword fidelity estimate after N runs of depth-M interferometers.

    A heuristic.  A depth-M chain with swaps equals one interferometer at
    ``M phi``, so its real per-run fidelity is the single-pass value there.
    """
    if not 0.0 <= f_mzi <= 1.0:
        raise ValueError("f_mzi must lie in [0, 1]")
    return f_mzi ** (depth * n_runs)


def _axis(values) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("grid axes must be non-empty 1-d sequences")
    return arr


def _half_step(axis: np.ndarray) -> float:
    return 0.5 * float(np.max(np.abs(np.diff(axis)))) if axis.size > 1 else 0.0


GRID_DTYPE = np.dtype(
    [("alpha", float), ("phi", float), ("zeta", float), ("fidelity", float), ("on_gkp_line", bool)]
)


def fidelity_grid(alphas, phis, zeta: float, *, method: str = "analytic", jobs: int = 1, dim=None) -> np.ndarray:
    """Row-major ``(alpha, phi)`` table of fidelities at fixed ``zeta``.

    A row is flagged ``on_gkp_line`` when ``|alpha phi/2 - sqrt(pi/2)|`` is
    below the change of ``alpha phi/2`` across half a grid cell.  ``method``
    is ``"analytic"`` or ``"exact"``; ``jobs`` caps concurrent evaluations.

    Returns
    -------
    numpy structured array with fields alpha, phi, zeta, fidelity, on_gkp_line
    """
    alphas, phis = _axis(alphas), _axis(phis)
    if method == "analytic":
        fn = fidelity_analytic
    elif method == "exact":
        def fn(p):
            return fidelity_exact(p, dim)
    else:
        raise ValueError(f"unknown method {method!r}")
    da, dp = _half_step(alphas), _half_step(phis)
    points = [MziParams(a, p, zeta) for a in alphas for p in phis]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                values = list(pool.map(fn, points))
        else:
            values = [fn(p) for p in points]
    out = np.empty(len(points), dtype=GRID_DTYPE)
    for row, (pt, f) in enumerate(zip(points, values)):
        tol = 0.5 * (da * abs(pt.phi) + dp * abs(pt.alpha))
        on_line = abs(abs(pt.alpha_phi) - GKP_DISPLACEMENT) <= max(tol, 1e-12)
        out[row] = (pt.alpha, pt.phi, zeta, f, on_line)
    return out


def gkp_line_fidelity(phis, zeta: float) -> np.ndarray:
    """``fidelity_analytic`` along ``alpha = 2 sqrt(pi/2)/phi``."""
    return np.array([fidelity_analytic(MziParams(gkp_alpha(p), p, zeta)) for p in _axis(phis)])
