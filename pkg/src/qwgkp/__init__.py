"""Quantum-walk encoding of GKP grid states with cat-state ancillas and interferometers.

Submodules
----------
fock      truncated photon-number states, Gaussian gates, parity conditioning, Wigner functions
analytic  closed-form superpositions of squeezed coherent states and codeword Wigner functions
encoder   ideal coin walk and exact interferometer + post-selection pipelines
ordering  operator-ordering ODE and its small-phase solution
fidelity  exact, ordered and closed-form interferometer fidelities, grid scans
"""

from .analytic import Superposition, codeword, to_fock, wigner_analytic
from .encoder import EncoderConfig, run_cmzi_encoding, run_mzi_encoding, success_rate, walk_coefficients
from .exceptions import ConvergenceError, DegenerateConditionError, SingularityError, TruncationError
from .fidelity import (
    MziParams,
    codeword_fidelity_estimate,
    fidelity_analytic,
    fidelity_exact,
    fidelity_grid,
    fidelity_ordered,
    squeezing_db,
)
from .fock import FockState, wigner_numeric

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DegenerateConditionError",
    "EncoderConfig",
    "FockState",
    "MziParams",
    "SingularityError",
    "Superposition",
    "TruncationError",
    "codeword",
    "codeword_fidelity_estimate",
    "fidelity_analytic",
    "fidelity_exact",
    "fidelity_grid",
    "fidelity_ordered",
    "run_cmzi_encoding",
    "run_mzi_encoding",
    "squeezing_db",
    "success_rate",
    "to_fock",
    "walk_coefficients",
    "wigner_analytic",
    "wigner_numeric",
    "__version__",
]
