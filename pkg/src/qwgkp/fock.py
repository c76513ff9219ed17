"""Truncated photon-number representation of one- and two-mode bosonic states.

Conventions used throughout the package:

* ``hbar = 1`` and ``a = (x + i p) / sqrt(2)``, so the vacuum has quadrature
  variance 1/2 and ``D(alpha)`` with real ``alpha`` shifts position by
  ``sqrt(2) * alpha``.
* ``D(alpha) = exp(alpha a^dag - alpha^* a)`` and
  ``S(zeta) = exp(-zeta/2 a^dag^2 + zeta^*/2 a^2)``; positive real ``zeta``
  squeezes the position quadrature by ``e^{-zeta}``.
* Two-mode amplitudes are stored as a ``(d1, d2)`` array with the mode-1 index
  major, i.e. the flattened basis index of ``|n1, n2>`` is ``n1 * d2 + n2``.
* The "interior" of a truncated space drops the top 10% of photon numbers of
  every mode; boundary rows of ladder-operator products are corrupted by the
  cutoff and are excluded from residual checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import minimize_scalar
from scipy.signal import find_peaks
from scipy.sparse.linalg import expm_multiply
from scipy.special import gammaln
from scipy.stats import poisson

from .exceptions import DegenerateConditionError, TruncationError

DEFAULT_TAIL_TOLERANCE = 1e-10
TAIL_FRACTION = 0.1
DEGENERATE_PROBABILITY = 1e-14


def tail_start(dim: int) -> int:
    """First photon number belonging to the top-10% tail of a ``dim`` cutoff."""
    return dim - max(1, math.ceil(TAIL_FRACTION * dim))


def coherent_dim(alpha: complex) -> int:
    """Cutoff for coherent content of amplitude ``alpha``.

    Starts from ``|alpha|^2 + 6|alpha| + 10`` and grows until the Poisson
    weight in the tail is a hundredth of the default tolerance.
    """
    a = abs(alpha)
    dim = math.ceil(a * a + 6 * a + 10)
    while poisson.sf(tail_start(dim) - 1, a * a) >= 0.01 * DEFAULT_TAIL_TOLERANCE:
        dim += 1
    return dim


def squeezed_dim(zeta: float) -> int:
    """Heuristic cutoff for squeezed-vacuum content."""
    return math.ceil(20 * math.exp(2 * abs(zeta)))


def suggest_dim(alpha: complex = 0.0, zeta: float = 0.0) -> int:
    """Default cutoff for a displaced squeezed state ``D(alpha) S(zeta)|0>``."""
    if zeta == 0:
        return coherent_dim(alpha)
    return coherent_dim(alpha) + squeezed_dim(zeta)


# --------------------------------------------------------------------------
# states


@dataclass(frozen=True, eq=False)
class FockState:
    """Pure state in a truncated photon-number basis (one or two modes).

    ``amplitudes`` is copied and frozen on construction.  ``tail_mass`` is the
    largest probability carried by the top 10% of photon numbers of any mode;
    states whose tail exceeds ``tail_tolerance`` are reported through
    ``tail_flagged``.
    """

    amplitudes: np.ndarray
    normalized: bool = False
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim not in (1, 2) or min(amps.shape) < 1:
            raise ValueError(f"amplitudes must be a 1-d or 2-d array, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes contain non-finite values")
        norm_sq = float(np.vdot(amps, amps).real)
        if norm_sq > 1 + 1e-12:
            raise ValueError(f"squared norm {norm_sq!r} exceeds 1")
        if self.normalized and abs(math.sqrt(norm_sq) - 1) >= 1e-10:
            raise ValueError(f"state flagged normalized but has norm {math.sqrt(norm_sq)!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def mode_count(self) -> int:
        return self.amplitudes.ndim

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(self.amplitudes.shape)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def marginal(self, mode: int = 0) -> np.ndarray:
        """Photon-number distribution of one mode."""
        prob = np.abs(self.amplitudes) ** 2
        if self.mode_count == 1:
            return prob
        return prob.sum(axis=1 - mode)

    @property
    def tail_mass(self) -> float:
        return max(
            float(self.marginal(m)[tail_start(d):].sum()) for m, d in enumerate(self.dims)
        )

    @property
    def tail_flagged(self) -> bool:
        return self.tail_mass >= self.tail_tolerance

    def normalize(self) -> FockState:
        n = self.norm
        if n == 0:
            raise DegenerateConditionError("cannot normalize the zero vector")
        return FockState(self.amplitudes / n, normalized=True, tail_tolerance=self.tail_tolerance)

    def truncate(self, dims: int | tuple[int, ...]) -> FockState:
        """Restrict to a smaller cutoff; raises if the discarded part is not negligible."""
        dims = _as_dims(dims, self.mode_count)
        sl = tuple(slice(0, d) for d in dims)
        cut = self.amplitudes[sl]
        lost = self.norm**2 - float(np.vdot(cut, cut).real)
        if lost > self.tail_tolerance:
            raise TruncationError(f"truncation to {dims} discards probability {lost:.3g}")
        return FockState(cut, tail_tolerance=self.tail_tolerance)

    def to_dict(self) -> dict:
        flat = self.amplitudes.ravel()
        return {
            "mode_count": self.mode_count,
            "dims": list(self.dims),
            "amplitudes": [[float(z.real), float(z.imag)] for z in flat],
            "normalized": bool(self.normalized),
        }

    @classmethod
    def from_dict(cls, data: dict) -> FockState:
        pairs = np.asarray(data["amplitudes"], dtype=float).reshape(-1, 2)
        amps = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(tuple(data["dims"]))
        return cls(amps, normalized=bool(data.get("normalized", False)))


def _as_dims(dims, mode_count: int) -> tuple[int, ...]:
    if isinstance(dims, (int, np.integer)):
        return (int(dims),) * mode_count
    return tuple(int(d) for d in dims)


def vacuum(dims: int | tuple[int, ...]) -> FockState:
    dims = _as_dims(dims, 1) if isinstance(dims, (int, np.integer)) else tuple(dims)
    amps = np.zeros(dims, dtype=complex)
    amps[(0,) * len(dims)] = 1.0
    return FockState(amps, normalized=True)


def number_state(n: int, dim: int) -> FockState:
    if not 0 <= n < dim:
        raise TruncationError(f"|{n}> does not fit in dim {dim}")
    amps = np.zeros(dim, dtype=complex)
    amps[n] = 1.0
    return FockState(amps, normalized=True)


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Exact ``<n|alpha> = exp(-|alpha|^2/2) alpha^n / sqrt(n!)`` for n < dim."""
    n = np.arange(dim)
    alpha = complex(alpha)
    if alpha == 0:
        out = np.zeros(dim, dtype=complex)
        out[0] = 1.0
        return out
    log_mag = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def coherent_state(alpha: complex, dim: int) -> FockState:
    amps = coherent_amplitudes(alpha, dim)
    return FockState(amps / np.linalg.norm(amps), normalized=True)


def cat_amplitudes(alpha: float, dim: int) -> np.ndarray:
    """Normalized even cat ``(|alpha> + |-alpha>)/sqrt(N_alpha)`` in the Fock basis."""
    amps = coherent_amplitudes(alpha, dim) + coherent_amplitudes(-alpha, dim)
    return amps / np.linalg.norm(amps)


def squeezed_vacuum_probabilities(zeta: float, dim: int) -> np.ndarray:
    """Analytic photon-number distribution of ``S(zeta)|0>`` (even support)."""
    prob = np.zeros(dim)
    k = np.arange((dim + 1) // 2)
    t = math.tanh(abs(zeta))
    if t == 0:
        prob[0] = 1.0
        return prob
    log_p = gammaln(2 * k + 1) - 2 * gammaln(k + 1) - 2 * k * math.log(2) + 2 * k * math.log(t)
    prob[2 * k] = np.exp(log_p) / math.cosh(zeta)
    return prob


def tensor(first: FockState, second: FockState) -> FockState:
    """Product state ``|first>_1 |second>_2``."""
    if first.mode_count != 1 or second.mode_count != 1:
        raise ValueError("tensor expects two one-mode states")
    amps = np.multiply.outer(first.amplitudes, second.amplitudes)
    return FockState(amps, normalized=first.normalized and second.normalized)


# --------------------------------------------------------------------------
# operators


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense (one mode) or sparse (two modes) matrix acting on a FockState.

    ``unitarity_residual`` is ``max|U^dag U - I|`` over the interior subspace
    and is only recorded for operators built as unitaries.
    """

    matrix: np.ndarray | sp.csr_matrix
    dims: tuple[int, ...]
    is_unitary: bool = False
    unitarity_residual: float | None = None

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else np.asarray(self.matrix)

    def dagger(self) -> OperatorMatrix:
        return OperatorMatrix(
            self.matrix.conj().T, self.dims, self.is_unitary, self.unitarity_residual
        )

    def __matmul__(self, other: OperatorMatrix) -> OperatorMatrix:
        if self.dims != other.dims:
            raise ValueError(f"dimension mismatch {self.dims} vs {other.dims}")
        prod = self.matrix @ other.matrix
        unitary = self.is_unitary and other.is_unitary
        return OperatorMatrix(prod, self.dims, unitary, _unitarity_residual(prod, self.dims) if unitary else None)


def interior_indices(dims: tuple[int, ...]) -> np.ndarray:
    """Flattened basis indices whose photon numbers avoid every mode's tail."""
    grids = np.meshgrid(*[np.arange(d) for d in dims], indexing="ij")
    mask = np.ones(grids[0].shape, dtype=bool)
    for g, d in zip(grids, dims):
        mask &= g < tail_start(d)
    return np.flatnonzero(mask.ravel())


def interior_residual(matrix, dims: tuple[int, ...]) -> float:
    """max-abs entry of ``matrix`` restricted to interior rows and columns."""
    idx = interior_indices(dims)
    block = matrix[idx][:, idx]
    if sp.issparse(block):
        return float(abs(block).max()) if block.nnz else 0.0
    return float(np.max(np.abs(block))) if block.size else 0.0


def _unitarity_residual(u, dims) -> float:
    gram = u.conj().T @ u
    eye = sp.identity(gram.shape[0], dtype=complex, format="csr") if sp.issparse(gram) else np.eye(gram.shape[0])
    return interior_residual(gram - eye, dims)


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def _annihilation_sparse(dim: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, dim, dtype=float)), 1, shape=(dim, dim), format="csr", dtype=complex)


@lru_cache(maxsize=64)
def _displacement_matrix(alpha: complex, dim: int) -> np.ndarray:
    a = annihilation(dim)
    mat = sla.expm(alpha * a.conj().T - np.conj(alpha) * a)
    mat.setflags(write=False)
    return mat


@lru_cache(maxsize=64)
def _squeeze_matrix(zeta: float, dim: int) -> np.ndarray:
    a = annihilation(dim)
    ad = a.conj().T
    mat = sla.expm(-0.5 * zeta * ad @ ad + 0.5 * zeta * a @ a)
    mat.setflags(write=False)
    return mat


def displacement_operator(alpha: complex, dim: int) -> OperatorMatrix:
    """``D(alpha)`` on a ``dim``-level truncation.

    Raises TruncationError when ``dim`` is below ``coherent_dim(alpha)``.
    """
    alpha = complex(alpha)
    if dim < 2:
        raise ValueError("dim must be at least 2")
    if dim < coherent_dim(alpha):
        raise TruncationError(f"dim={dim} too small for |alpha|={abs(alpha):.4g}; need {coherent_dim(alpha)}")
    mat = _displacement_matrix(alpha, dim)
    return OperatorMatrix(mat, (dim,), True, _unitarity_residual(mat, (dim,)))


def squeeze_operator(zeta: float, dim: int, tail_tolerance: float = DEFAULT_TAIL_TOLERANCE) -> OperatorMatrix:
    """``S(zeta)`` on a ``dim``-level truncation (real ``zeta``).

    Raises TruncationError when ``S(zeta)|0>`` puts ``tail_tolerance`` or more
    probability in the top 10% of photon numbers.
    """
    zeta = float(zeta)
    if dim < 2:
        raise ValueError("dim must be at least 2")
    # weight beyond the cutoff counts as tail too
    tail = 1.0 - float(squeezed_vacuum_probabilities(zeta, dim)[: tail_start(dim)].sum())
    if tail >= tail_tolerance:
        raise TruncationError(f"dim={dim} too small for zeta={zeta:.4g}: tail mass {tail:.3g}")
    mat = _squeeze_matrix(zeta, dim)
    return OperatorMatrix(mat, (dim,), True, _unitarity_residual(mat, (dim,)))


def mzi_mode_matrix(phi: float) -> np.ndarray:
    """Heisenberg mode transformation ``a_out = M a_in`` of the interferometer."""
    s, c = math.sin(phi / 2), math.cos(phi / 2)
    return np.array([[s, c], [c, -s]])


@lru_cache(maxsize=16)
def _mzi_sparse(phi: float, d1: int, d2: int) -> tuple[sp.csr_matrix, float]:
    # M is real symmetric with eigenvalues +1, -1, so M = exp(i pi P_minus) and
    # U = exp(sum_ij K_ij a_i^dag a_j) with K = i pi P_minus gives U^dag a U = M a.
    w, v = np.linalg.eigh(mzi_mode_matrix(phi))
    vm = v[:, np.argmin(w)]
    kmat = 1j * np.pi * np.outer(vm, vm)
    rows, cols, vals = [], [], []
    residual = 0.0
    cut1, cut2 = tail_start(d1), tail_start(d2)
    for total in range(d1 + d2 - 1):
        n1 = np.arange(max(0, total - d2 + 1), min(total, d1 - 1) + 1)
        n2 = total - n1
        size = len(n1)
        gen = np.zeros((size, size), dtype=complex)
        gen[np.arange(size), np.arange(size)] = kmat[0, 0] * n1 + kmat[1, 1] * n2
        # a1^dag a2 |n1, n2> = sqrt((n1+1) n2) |n1+1, n2-1>, i.e. block index j -> j+1
        hop = np.sqrt((n1[:-1] + 1.0) * n2[:-1])
        gen[np.arange(1, size), np.arange(size - 1)] += kmat[0, 1] * hop
        gen[np.arange(size - 1), np.arange(1, size)] += kmat[1, 0] * hop
        block = sla.expm(gen)
        inside = (n1 < cut1) & (n2 < cut2)
        if inside.any():
            gram = block.conj().T @ block - np.eye(size)
            residual = max(residual, float(np.max(np.abs(gram[np.ix_(inside, inside)]))))
        flat = n1 * d2 + n2
        rr, cc = np.meshgrid(flat, flat, indexing="ij")
        rows.append(rr.ravel())
        cols.append(cc.ravel())
        vals.append(block.ravel())
    n = d1 * d2
    mat = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    return mat, residual


def mzi_unitary(phi: float, dims: tuple[int, int]) -> OperatorMatrix:
    """Two-mode interferometer unitary realizing ``mzi_mode_matrix(phi)``.

    The generator is a passive quadratic form, so the matrix is block diagonal
    in total photon number and exact on every block with ``n1 + n2 < dim``.
    The overall phase convention is ``U = exp(i pi b^dag b)`` with ``b`` the
    mode along the ``-1`` eigenvector of the mode matrix.
    """
    d1, d2 = _as_dims(dims, 2)
    if d1 != d2:
        raise ValueError("interferometer modes must share one cutoff")
    mat, residual = _mzi_sparse(float(phi), d1, d2)
    return OperatorMatrix(mat, (d1, d2), True, residual)


def two_mode_ladders(dims: tuple[int, int]) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    d1, d2 = _as_dims(dims, 2)
    a1 = sp.kron(_annihilation_sparse(d1), sp.identity(d2, format="csr"), format="csr")
    a2 = sp.kron(sp.identity(d1, format="csr"), _annihilation_sparse(d2), format="csr")
    return a1, a2


def ordering_operators(dims: tuple[int, int]) -> dict[str, OperatorMatrix]:
    """Hermitian quadratic operators A1, A2, B, C and A = (A1 - A2)/2.

    ``A_j = i(a_j^2 - a_j^dag^2)``, ``B = i(a1^dag a2 - a1 a2^dag)``,
    ``C = i(a1 a2 - a1^dag a2^dag)``.
    """
    dims = _as_dims(dims, 2)
    a1, a2 = two_mode_ladders(dims)
    a1d, a2d = a1.conj().T, a2.conj().T
    mats = {
        "A1": 1j * (a1 @ a1 - a1d @ a1d),
        "A2": 1j * (a2 @ a2 - a2d @ a2d),
        "B": 1j * (a1d @ a2 - a1 @ a2d),
        "C": 1j * (a1 @ a2 - a1d @ a2d),
    }
    mats["A"] = 0.5 * (mats["A1"] - mats["A2"])
    return {k: OperatorMatrix(v.tocsr(), dims) for k, v in mats.items()}


# --------------------------------------------------------------------------
# operations on states


def apply(op: OperatorMatrix, state: FockState) -> FockState:
    """``op |state>`` for an operator on the full space of ``state``."""
    if op.dims != state.dims:
        raise ValueError(f"dimension mismatch: operator {op.dims}, state {state.dims}")
    out = op.matrix @ state.amplitudes.ravel()
    return FockState(np.asarray(out).reshape(state.dims), normalized=state.normalized and op.is_unitary)


def apply_local(op: OperatorMatrix, state: FockState, mode: int) -> FockState:
    """Apply a one-mode operator to ``mode`` of a two-mode state."""
    if state.mode_count == 1:
        return apply(op, state)
    if op.dims != (state.dims[mode],):
        raise ValueError(f"dimension mismatch: operator {op.dims}, mode {mode} of {state.dims}")
    mat = op.dense()
    amps = mat @ state.amplitudes if mode == 0 else state.amplitudes @ mat.T
    return FockState(amps, normalized=state.normalized and op.is_unitary)


def evolve(generator, state: FockState) -> FockState:
    """``exp(generator) |state>`` for a (sparse) generator on the state's full space."""
    out = expm_multiply(generator, state.amplitudes.ravel().astype(complex))
    amps = np.asarray(out).reshape(state.dims)
    norm = np.linalg.norm(amps)
    # anti-Hermitian generators preserve the norm up to round-off
    if state.normalized and abs(norm - 1) < 1e-8:
        amps = amps / norm
        return FockState(amps, normalized=True)
    return FockState(amps)


def overlap(a: FockState, b: FockState) -> complex:
    """``<a|b>``."""
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch {a.dims} vs {b.dims}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: FockState, b: FockState) -> float:
    """``|<a|b>|`` of the normalized states (global phase ignored)."""
    return abs(overlap(a, b)) / (a.norm * b.norm)


def _parity_mask(dim: int, parity: str) -> np.ndarray:
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    return (np.arange(dim) % 2) == (0 if parity == "even" else 1)


def project_parity(state: FockState, mode: int, parity: str = "even") -> tuple[FockState, float]:
    """Project ``mode`` onto even or odd photon numbers.

    Returns the unnormalized projected state and its probability (squared norm).
    """
    if state.mode_count != 2:
        raise ValueError("project_parity expects a two-mode state")
    mask = _parity_mask(state.dims[mode], parity)
    amps = state.amplitudes.copy()
    if mode == 0:
        amps[~mask, :] = 0
    else:
        amps[:, ~mask] = 0
    prob = float(np.vdot(amps, amps).real)
    return FockState(amps), prob


class ConditionalResult(NamedTuple):
    state: FockState
    probability: float
    purity: float


def conditional_state(
    state: FockState, mode: int, condition: str = "even", *, alpha: float | None = None
) -> ConditionalResult:
    """Condition ``mode`` of a two-mode state and return the other mode.

    ``condition="even"`` projects onto even photon numbers; the kept mode's
    reduced state is then generally mixed, so its dominant eigenvector is
    returned together with the purity ``Tr rho^2``.  ``condition="cat"``
    projects onto the normalized even cat of amplitude ``alpha`` and always
    yields a pure state.
    """
    if state.mode_count != 2:
        raise ValueError("conditional_state expects a two-mode state")
    amps = state.amplitudes if mode == 1 else state.amplitudes.T
    if condition == "even":
        kept = amps[:, _parity_mask(amps.shape[1], "even")]
        u, svals, _ = np.linalg.svd(kept, full_matrices=False)
        weights = svals**2
        prob = float(weights.sum())
        if prob < DEGENERATE_PROBABILITY:
            raise DegenerateConditionError(f"even-parity probability {prob:.3g} is zero")
        vec = u[:, 0]
        purity = float((weights**2).sum() / prob**2)
    elif condition == "cat":
        if alpha is None:
            raise ValueError("cat conditioning needs alpha")
        vec = amps @ np.conj(cat_amplitudes(alpha, amps.shape[1]))
        prob = float(np.vdot(vec, vec).real)
        if prob < DEGENERATE_PROBABILITY:
            raise DegenerateConditionError(f"cat-projection probability {prob:.3g} is zero")
        purity = 1.0
    else:
        raise ValueError(f"unknown condition {condition!r}")
    # fix the global phase: largest component real positive
    k = int(np.argmax(np.abs(vec)))
    vec = vec * np.exp(-1j * np.angle(vec[k]))
    vec = vec / np.linalg.norm(vec)
    return ConditionalResult(FockState(vec, normalized=True), prob, purity)


def swap_modes(state: FockState) -> FockState:
    if state.mode_count != 2:
        raise ValueError("swap_modes expects a two-mode state")
    return FockState(state.amplitudes.T, normalized=state.normalized)


# --------------------------------------------------------------------------
# observables


def mode_means(state: FockState) -> np.ndarray:
    """First moments ``<a_j>`` for each mode."""
    amps = state.amplitudes
    if state.mode_count == 1:
        return np.array([np.vdot(amps, annihilation(len(amps)) @ amps)])
    d1, d2 = amps.shape
    m1 = np.vdot(amps, annihilation(d1) @ amps)
    m2 = np.vdot(amps, amps @ annihilation(d2).T)
    return np.array([m1, m2])


def quadrature_variance(state: FockState, quadrature: str = "x") -> float:
    """Variance of ``x = (a + a^dag)/sqrt(2)`` or ``p = (a - a^dag)/(i sqrt(2))``."""
    if state.mode_count != 1:
        raise ValueError("quadrature_variance expects a one-mode state")
    a = annihilation(state.dims[0])
    q = (a + a.conj().T) / math.sqrt(2) if quadrature == "x" else (a - a.conj().T) / (1j * math.sqrt(2))
    psi = state.amplitudes / state.norm
    mean = np.vdot(psi, q @ psi).real
    return float(np.vdot(psi, q @ (q @ psi)).real - mean**2)


def parity_expectation(state: FockState) -> float:
    sign = (-1.0) ** np.arange(state.dims[0])
    prob = state.marginal(0) if state.mode_count == 1 else np.abs(state.amplitudes) ** 2
    if state.mode_count == 2:
        sign = np.multiply.outer(sign, (-1.0) ** np.arange(state.dims[1]))
    return float((sign * prob).sum() / state.norm**2)


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Harmonic-oscillator eigenfunctions ``<x|n>`` for n < n_max, shape (n_max, *x.shape)."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max,) + x.shape)
    out[0] = np.pi**-0.25 * np.exp(-0.5 * x * x)
    if n_max > 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, n_max - 1):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def position_wavefunction(state: FockState, x) -> np.ndarray:
    """``<x|psi>`` of a one-mode state."""
    if state.mode_count != 1:
        raise ValueError("position_wavefunction expects a one-mode state")
    x = np.asarray(x, dtype=float)
    h = hermite_functions(state.dims[0], x.ravel())
    return (state.amplitudes @ h).reshape(x.shape)


@lru_cache(maxsize=8)
def _position_eigensystem(dim: int) -> tuple[np.ndarray, np.ndarray]:
    off = np.sqrt(np.arange(1, dim) / 2.0)
    return eigh_tridiagonal(np.zeros(dim), off)


def wigner_pad_dim(dim: int, beta_max: float) -> int:
    """Working cutoff for displaced-parity evaluation out to ``|beta| = beta_max``."""
    reach = math.sqrt(dim) + beta_max
    return math.ceil(reach * reach + 8 * reach + 20)


def wigner_numeric(state: FockState, x, p, *, work_dim: int | None = None, chunk: int = 2048) -> np.ndarray:
    """Wigner function via the displaced parity ``(1/pi) <Pi D(-beta) psi>``.

    ``beta = (x + i p)/sqrt(2)``.  Each ``D(-beta)`` is applied as
    ``R exp(-i r x_hat) R^dag`` with ``R`` a phase-space rotation (diagonal in
    Fock space) and ``x_hat`` diagonalized once on an enlarged cutoff, so the
    whole grid reduces to two dense matrix products.
    """
    if state.mode_count != 1:
        raise ValueError("wigner_numeric expects a one-mode state")
    x, p = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
    shape = x.shape
    xf, pf = x.ravel(), p.ravel()
    psi = state.amplitudes / state.norm
    dim = len(psi)
    r = np.hypot(xf, pf)
    if work_dim is None:
        work_dim = wigner_pad_dim(dim, float(r.max(initial=0.0)) / math.sqrt(2))
    work_dim = max(work_dim, dim)
    lam, vec = _position_eigensystem(work_dim)
    n = np.arange(work_dim)
    sign = (-1.0) ** n
    psi_w = np.zeros(work_dim, dtype=complex)
    psi_w[:dim] = psi
    theta = np.arctan2(-xf, pf)
    out = np.empty(len(xf))
    for start in range(0, len(xf), chunk):
        sl = slice(start, start + chunk)
        rotated = np.exp(-1j * np.outer(n, theta[sl])) * psi_w[:, None]
        coeff = vec.T @ rotated
        coeff *= np.exp(-1j * np.outer(lam, r[sl]))
        displaced = vec @ coeff
        out[sl] = sign @ (np.abs(displaced) ** 2) / np.pi
    return out.reshape(shape)


def position_peaks(state: FockState, lo: float, hi: float, *, samples: int = 4001, min_height: float = 1e-3) -> np.ndarray:
    """Local maxima of the position density ``|psi(x)|^2`` on ``[lo, hi]``.

    Grid maxima above ``min_height`` times the global maximum are refined by
    bounded scalar optimization.
    """
    grid = np.linspace(lo, hi, samples)
    dens = np.abs(position_wavefunction(state, grid)) ** 2
    idx, _ = find_peaks(dens, height=min_height * dens.max())
    step = grid[1] - grid[0]
    peaks = []
    for i in idx:
        res = minimize_scalar(
            lambda t: -abs(position_wavefunction(state, np.array([t]))[0]) ** 2,
            bounds=(grid[i] - step, grid[i] + step),
            method="bounded",
            options={"xatol": 1e-10},
        )
        peaks.append(res.x)
    return np.array(peaks)
