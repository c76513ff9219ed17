"""Exact superpositions of equally squeezed coherent states with real displacements.

A term ``c |alpha, zeta>`` stands for ``c D(alpha) S(zeta)|0>``.  With real
``alpha`` its position wavefunction is a real Gaussian of width ``e^{-zeta}/sqrt(2)``
centred at ``sqrt(2) alpha``, which makes overlaps, norms, Wigner functions and
marginals available in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import fock
from .exceptions import TruncationError


@dataclass(frozen=True)
class SqueezedCoherentTerm:
    coeff: complex
    alpha: float
    zeta: float

    def __post_init__(self):
        for name in ("coeff", "alpha", "zeta"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "zeta", float(self.zeta))
        object.__setattr__(self, "coeff", complex(self.coeff))


def pair_overlap(t1: SqueezedCoherentTerm, t2: SqueezedCoherentTerm) -> complex:
    """``<alpha1, zeta|alpha2, zeta>`` (coefficients are not included).

    For real displacements both wavefunctions are real Gaussians, so the
    overlap is ``exp(-e^{2 zeta} (alpha1 - alpha2)^2 / 2)``.
    """
    if t1.zeta != t2.zeta:
        raise ValueError(f"terms carry different squeezing: {t1.zeta} vs {t2.zeta}")
    d = t1.alpha - t2.alpha
    return complex(math.exp(-0.5 * math.exp(2 * t1.zeta) * d * d))


def _gram(alphas: np.ndarray, zeta: float) -> np.ndarray:
    d = alphas[:, None] - alphas[None, :]
    return np.exp(-0.5 * math.exp(2 * zeta) * d * d)


@dataclass(frozen=True)
class Superposition:
    """``sum_j c_j |alpha_j, zeta>`` with one shared squeezing parameter."""

    terms: tuple[SqueezedCoherentTerm, ...]
    normalized: bool = False

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("a superposition needs at least one term")
        if len({t.zeta for t in terms}) != 1:
            raise ValueError("all terms must share zeta")
        object.__setattr__(self, "terms", terms)
        if self.normalized and abs(norm(self) - 1) >= 1e-10:
            raise ValueError("superposition flagged normalized but its norm is not 1")

    @classmethod
    def from_arrays(cls, coeffs: Sequence[complex], alphas: Sequence[float], zeta: float, *, normalize: bool = True) -> Superposition:
        s = cls(tuple(SqueezedCoherentTerm(c, a, zeta) for c, a in zip(coeffs, alphas)))
        return s.normalize() if normalize else s

    @property
    def zeta(self) -> float:
        return self.terms[0].zeta

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([t.coeff for t in self.terms])

    @property
    def displacements(self) -> np.ndarray:
        return np.array([t.alpha for t in self.terms])

    def normalize(self) -> Superposition:
        n = norm(self)
        return Superposition(
            tuple(SqueezedCoherentTerm(t.coeff / n, t.alpha, t.zeta) for t in self.terms), normalized=True
        )


def norm(s: Superposition) -> float:
    """State norm from the pairwise-overlap Gram matrix."""
    c = s.coefficients
    g = _gram(s.displacements, s.zeta)
    return math.sqrt(max(float(np.real(np.conj(c) @ g @ c)), 0.0))


def inner(a: Superposition, b: Superposition) -> complex:
    """``<a|b>`` for two superpositions with the same squeezing."""
    if a.zeta != b.zeta:
        raise ValueError("superpositions carry different squeezing")
    d = a.displacements[:, None] - b.displacements[None, :]
    g = np.exp(-0.5 * math.exp(2 * a.zeta) * d * d)
    return complex(np.conj(a.coefficients) @ g @ b.coefficients)


def cat_normalization(alpha: float) -> float:
    """``N_alpha = 2 (1 + e^{-2|alpha|^2})``, the squared norm of ``|alpha> + |-alpha>``."""
    return 2.0 * (1.0 + math.exp(-2.0 * abs(alpha) ** 2))


def cat_state(alpha: float) -> Superposition:
    """Even cat ``(|+alpha> + |-alpha>)/sqrt(N_alpha)``."""
    c = 1.0 / math.sqrt(cat_normalization(alpha))
    return Superposition(
        (SqueezedCoherentTerm(c, alpha, 0.0), SqueezedCoherentTerm(c, -alpha, 0.0)), normalized=True
    )


def codeword_weights(n_runs: int) -> list[int]:
    return [math.comb(n_runs, m) for m in range(n_runs + 1)]


def codeword(n_runs: int, alpha_phi: float, zeta: float) -> Superposition:
    """Normalized N-run codeword ``sum_m C(N, m) |(2m - N) alpha_phi, zeta>``."""
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    alphas = [(2 * m - n_runs) * alpha_phi for m in range(n_runs + 1)]
    return Superposition.from_arrays(codeword_weights(n_runs), alphas, zeta)


def to_fock(s: Superposition, dim: int | None = None, *, pad: int | None = None) -> fock.FockState:
    """Fock amplitudes of ``s`` built as ``sum_j c_j D(alpha_j) S(zeta)|0>``.

    Operators act on an enlarged cutoff ``dim + pad`` so that their corrupted
    boundary rows never reach the returned ``dim`` levels.  Raises
    TruncationError if the result puts non-negligible weight in the top 10%
    of ``dim``.
    """
    amax = float(np.max(np.abs(s.displacements)))
    if dim is None:
        dim = fock.suggest_dim(amax, s.zeta)
    if pad is None:
        pad = max(16, dim // 4)
    work = dim + pad
    seed = fock.apply(fock.squeeze_operator(s.zeta, work), fock.vacuum(work)).amplitudes
    amps = np.zeros(work, dtype=complex)
    for t in s.terms:
        if t.alpha == 0:
            amps += t.coeff * seed
        else:
            amps += t.coeff * (fock.displacement_operator(t.alpha, work).matrix @ seed)
    cut = amps[:dim]
    total = float(np.vdot(amps, amps).real)
    lost = total - float(np.vdot(cut, cut).real)
    tail = float(np.sum(np.abs(cut[fock.tail_start(dim):]) ** 2))
    if tail / total >= fock.DEFAULT_TAIL_TOLERANCE or lost / total >= fock.DEFAULT_TAIL_TOLERANCE:
        raise TruncationError(f"dim={dim} too small: tail mass {max(tail, lost) / total:.3g}")
    return fock.FockState(cut / np.linalg.norm(cut), normalized=True)


def _codeword_arrays(n_runs: int, alpha_phi: float, zeta: float):
    s = codeword(n_runs, alpha_phi, zeta)
    m = np.arange(n_runs + 1)
    centers = math.sqrt(2.0) * (2 * m - n_runs) * alpha_phi
    return s.coefficients.real, centers, m


def wigner_analytic(n_runs: int, alpha_phi: float, zeta: float, x, p) -> np.ndarray:
    """Closed-form Wigner function of the normalized N-run codeword.

    Double sum over term pairs (m, n) of ``C(N,m) C(N,n)`` times
    ``exp{2 (m-n)^2 alpha_phi^2 e^{2 zeta}}``, two position Gaussians of
    inverse variance ``e^{2 zeta}`` about the term centres,
    ``exp{-p^2 e^{-2 zeta}}`` and the fringe ``cos(2 sqrt(2) (m-n) alpha_phi p)``.
    The three exponents are summed before exponentiating because the pair
    prefactor alone overflows for moderate N.
    """
    x, p = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
    weights, centers, m = _codeword_arrays(n_runs, alpha_phi, zeta)
    s = math.exp(2 * zeta)
    out = np.zeros(x.shape)
    for i in range(n_runs + 1):
        for j in range(n_runs + 1):
            dm = m[i] - m[j]
            exponent = (
                2.0 * dm * dm * alpha_phi**2 * s
                - 0.5 * s * ((x - centers[i]) ** 2 + (x - centers[j]) ** 2)
                - p * p / s
            )
            out += weights[i] * weights[j] * np.exp(exponent) * np.cos(2 * math.sqrt(2.0) * dm * alpha_phi * p)
    return out / math.pi


def marginals(n_runs: int, alpha_phi: float, zeta: float, axis: str, grid) -> np.ndarray:
    """Position (``axis="x"``) or momentum (``axis="p"``) marginal of the codeword Wigner function."""
    grid = np.asarray(grid, dtype=float)
    weights, centers, m = _codeword_arrays(n_runs, alpha_phi, zeta)
    s = math.exp(2 * zeta)
    if axis == "x":
        # integrating the fringe over p cancels the pair prefactor exactly
        amp = np.zeros(grid.shape)
        for w, c in zip(weights, centers):
            amp += w * (s / math.pi) ** 0.25 * np.exp(-0.5 * s * (grid - c) ** 2)
        return amp * amp
    if axis == "p":
        out = np.zeros(grid.shape)
        for i in range(n_runs + 1):
            for j in range(n_runs + 1):
                dm = m[i] - m[j]
                out += weights[i] * weights[j] * np.cos(2 * math.sqrt(2.0) * dm * alpha_phi * grid)
        return out * np.exp(-grid * grid / s) / math.sqrt(math.pi * s)
    raise ValueError(f"axis must be 'x' or 'p', got {axis!r}")
