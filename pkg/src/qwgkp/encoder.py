"""Quantum-walk encoding pipelines.

Two models are provided:

* the ideal walk, a two-level coin with orthogonal basis ``{R, L}`` driving
  conditional displacements ``D(+/- alpha_phi)`` (exact lattice arithmetic);
* the physical interferometer pipeline, where an even cat ancilla in port 1
  and the signal in port 2 pass through one interferometer (or ``M``
  interferometers with the outputs swapped in between), after which the
  ancilla output is post-selected on even parity or on the cat state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import fock
from .analytic import Superposition, codeword, codeword_weights, norm, to_fock
from .exceptions import TruncationError

MERGE_TOLERANCE = 1e-9


def success_rate(n_runs: int) -> float:
    """Ideal probability ``2^{-N}`` that all N parity post-selections succeed."""
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    return 2.0**-n_runs


def ideal_probability(run: int, alpha_phi: float, zeta: float) -> float:
    """Even-parity success probability of run ``k`` under the ideal map.

    Post-selection leaves ``(D(+a) psi + D(-a) psi)/2`` with ``psi`` the normalized
    codeword of run ``k-1``, so ``p_k = |Psi_k|^2 / (4 |Psi_{k-1}|^2)`` in terms of
    unnormalized binomial codewords.  ``p_1 = (1 + <+a, zeta|-a, zeta>)/2``.
    """
    if run < 1:
        raise ValueError("run must be >= 1")

    def sq_norm(n: int) -> float:
        if n == 0:
            return 1.0
        alphas = [(2 * m - n) * alpha_phi for m in range(n + 1)]
        return norm(Superposition.from_arrays(codeword_weights(n), alphas, zeta, normalize=False)) ** 2

    return sq_norm(run) / (4.0 * sq_norm(run - 1))


def ideal_step(s: Superposition, alpha_phi: float) -> Superposition:
    """One coin-projected walk step: ``Psi -> D(+alpha_phi) Psi + D(-alpha_phi) Psi``, renormalized."""
    merged: list[list[float | complex]] = []
    for t in s.terms:
        for sign in (1.0, -1.0):
            a = t.alpha + sign * alpha_phi
            for entry in merged:
                if abs(entry[0] - a) <= MERGE_TOLERANCE:
                    entry[1] += t.coeff
                    break
            else:
                merged.append([a, t.coeff])
    merged.sort(key=lambda e: e[0])
    return Superposition.from_arrays([c for _, c in merged], [a for a, _ in merged], s.zeta)


def walk_coefficients(n_runs: int) -> list[int]:
    """Integer lattice amplitudes after N steps of the ideal coin walk.

    The coin starts in ``|R>``; each step applies the projective coin
    ``|D><D|`` with ``|D> = (|R> + |L>)/sqrt(2)`` followed by the conditional
    translation (R: +1 site, L: -1 site), and the coin is finally projected
    onto ``<D|``.  Entry ``m`` belongs to site ``2m - N``.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    amps: dict[tuple[str, int], Fraction] = {("R", 0): Fraction(1)}
    for _ in range(n_runs):
        # |D><D| = 1/2 [[1, 1], [1, 1]] in the {R, L} basis
        summed: dict[int, Fraction] = {}
        for (_, k), c in amps.items():
            summed[k] = summed.get(k, Fraction(0)) + c
        amps = {}
        for k, c in summed.items():
            amps[("R", k + 1)] = amps.get(("R", k + 1), Fraction(0)) + c / 2
            amps[("L", k - 1)] = amps.get(("L", k - 1), Fraction(0)) + c / 2
    final: dict[int, Fraction] = {}
    for (_, k), c in amps.items():
        final[k] = final.get(k, Fraction(0)) + c
    sites = range(-n_runs, n_runs + 1, 2)
    unit = min(final[k] for k in sites)
    out = [final[k] / unit for k in sites]
    if any(v.denominator != 1 for v in out) or set(final) != set(sites):
        raise ArithmeticError("walk amplitudes are not an integer lattice profile")
    return [int(v) for v in out]


def ideal_walk_reference(n_runs: int, alpha_phi: float, zeta: float) -> Superposition:
    """Normalized mode state produced by the ideal N-step coin walk."""
    coeffs = walk_coefficients(n_runs)
    alphas = [(2 * m - n_runs) * alpha_phi for m in range(n_runs + 1)]
    return Superposition.from_arrays(coeffs, alphas, zeta)


@dataclass(frozen=True)
class EncoderConfig:
    """Parameters of one encoding experiment.

    ``alpha`` is the cat amplitude, ``phi`` the interferometer phase and
    ``depth`` the number of concatenated interferometers per run.  ``dim`` is
    the per-mode cutoff; ``None`` picks one from the photon statistics.
    """

    runs: int
    alpha: float
    phi: float
    zeta: float
    depth: int = 1
    dim: int | None = None
    postselect: str = "even"

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.postselect not in ("even", "cat"):
            raise ValueError("postselect must be 'even' or 'cat'")
        if self.dim is not None and self.dim < 2:
            raise ValueError("dim must be >= 2")

    @property
    def alpha_phi(self) -> float:
        return self.alpha * self.phi / 2

    @property
    def step(self) -> float:
        """Walk step length ``depth * alpha_phi``."""
        return self.depth * self.alpha_phi

    def resolved_dim(self) -> int:
        return self.dim if self.dim is not None else encoder_dim(self)

    def to_dict(self) -> dict:
        return {
            "runs": self.runs,
            "alpha": self.alpha,
            "phi": self.phi,
            "zeta": self.zeta,
            "depth": self.depth,
            "dim": self.dim,
            "postselect": self.postselect,
        }


def encoder_dim(config: EncoderConfig, tolerance: float = fock.DEFAULT_TAIL_TOLERANCE) -> int:
    """Smallest cutoff whose top 10% carries < tolerance of the total photon number.

    The total photon number of cat (x) final codeword bounds both output modes
    and keeps the interferometer's number-conserving blocks complete.
    """
    target = codeword(config.runs, config.step, config.zeta)
    sig = to_fock(target).marginal()
    anc = np.abs(fock.cat_amplitudes(config.alpha, fock.coherent_dim(config.alpha) + 20)) ** 2
    total = np.convolve(sig, anc)
    survival = np.cumsum(total[::-1])[::-1]
    for d in range(8, 4 * len(total)):
        start = fock.tail_start(d)
        if start >= len(survival) or survival[start] < tolerance:
            return d
    raise TruncationError("could not find an adequate cutoff")


@dataclass(frozen=True)
class RunRecord:
    run: int
    probability: float
    fidelity: float
    purity: float

    def to_dict(self) -> dict:
        return {"run": self.run, "probability": self.probability, "fidelity": self.fidelity, "purity": self.purity}


@dataclass(frozen=True)
class EncodeReport:
    config: EncoderConfig
    dim: int
    final_state: fock.FockState
    analytic_reference: Superposition
    per_run: tuple[RunRecord, ...] = field(default_factory=tuple)

    @property
    def cumulative_success(self) -> float:
        return math.prod(r.probability for r in self.per_run)

    def to_dict(self, final_state_ref: str | None = None) -> dict:
        return {
            "config": self.config.to_dict(),
            "dim": self.dim,
            "per_run": [r.to_dict() for r in self.per_run],
            "cumulative_success": self.cumulative_success,
            "final_state_ref": final_state_ref,
        }


def _encode(config: EncoderConfig) -> EncodeReport:
    d = config.resolved_dim()
    cat = fock.FockState(fock.cat_amplitudes(config.alpha, d), normalized=True)
    mzi = fock.mzi_unitary(config.phi, (d, d))
    signal = to_fock(Superposition.from_arrays([1.0], [0.0], config.zeta), d)
    records = []
    reference = None
    for run in range(1, config.runs + 1):
        state = fock.tensor(cat, signal)
        for k in range(config.depth):
            if k:
                # output 1' (signal) re-enters port 2, output 2' (ancilla) port 1
                state = fock.swap_modes(state)
            state = fock.apply(mzi, state)
        signal, prob, purity = fock.conditional_state(state, 1, config.postselect, alpha=config.alpha)
        reference = codeword(run, config.step, config.zeta)
        fid = fock.fidelity(to_fock(reference, d), signal)
        records.append(RunRecord(run, prob, min(fid, 1.0), purity))
    return EncodeReport(config, d, signal, reference, tuple(records))


def run_mzi_encoding(config: EncoderConfig) -> EncodeReport:
    """Exact truncated-Fock simulation of N runs with one interferometer per run."""
    if config.depth != 1:
        raise ValueError("run_mzi_encoding uses depth 1; see run_cmzi_encoding")
    return _encode(config)


def run_cmzi_encoding(config: EncoderConfig) -> EncodeReport:
    """As run_mzi_encoding but with ``config.depth`` concatenated interferometers per run.

    The walk step becomes ``depth * alpha_phi`` and the reference codeword is
    built with that step.  ``depth=1`` follows exactly the single-interferometer path.
    """
    return _encode(config)
