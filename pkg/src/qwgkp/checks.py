"""Self-check suites run by ``qwgkp check``.

Each suite returns rows ``(suite, name, value, tolerance, passed, enforced)``.
Rows with ``enforced=False`` are informative and never fail a suite.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import analytic, fidelity, fock, ordering

SUITES = ("algebra", "ordering", "wigner", "fidelity")


@dataclass(frozen=True)
class CheckRow:
    suite: str
    name: str
    value: float
    tolerance: float
    passed: bool
    enforced: bool = True


def _below(suite: str, name: str, value: float, tol: float, enforced: bool = True) -> CheckRow:
    return CheckRow(suite, name, float(value), tol, bool(value < tol), enforced)


def algebra_suite(dim: int = 14) -> list[CheckRow]:
    """Commutation relations of the quadratic operator set and unitarity of the gates."""
    dims = (dim, dim)
    ops = {k: v.matrix for k, v in fock.ordering_operators(dims).items()}
    a_plus = 0.5 * (ops["A1"] + ops["A2"])

    def comm(x, y):
        return x @ y - y @ x

    relations = {
        "[A1,A2]=0": comm(ops["A1"], ops["A2"]),
        "[A1,B]=2iC": comm(ops["A1"], ops["B"]) - 2j * ops["C"],
        "[A1,C]=2iB": comm(ops["A1"], ops["C"]) - 2j * ops["B"],
        "[A2,B]=-2iC": comm(ops["A2"], ops["B"]) + 2j * ops["C"],
        "[A2,C]=-2iB": comm(ops["A2"], ops["C"]) + 2j * ops["B"],
        "[A,B]=2iC": comm(ops["A"], ops["B"]) - 2j * ops["C"],
        "[A,C]=2iB": comm(ops["A"], ops["C"]) - 2j * ops["B"],
        "[B,C]=2iA": comm(ops["B"], ops["C"]) - 2j * ops["A"],
        "[A1+A2,A]=0": comm(a_plus, ops["A"]),
        "[A1+A2,B]=0": comm(a_plus, ops["B"]),
        "[A1+A2,C]=0": comm(a_plus, ops["C"]),
    }
    rows = [_below("algebra", k, fock.interior_residual(v, dims), 1e-8) for k, v in relations.items()]
    rows.append(_below("algebra", "|B|00>|", ordering.b_vacuum_residual(dim), 1e-14))
    rows.append(_below("algebra", "mzi unitarity", fock.mzi_unitary(0.7, dims).unitarity_residual, 1e-10))
    d = 40
    rows.append(_below("algebra", "displacement unitarity", fock.displacement_operator(1.5, d).unitarity_residual, 1e-10))
    rows.append(_below("algebra", "squeeze unitarity", fock.squeeze_operator(0.5, d).unitarity_residual, 1e-10))
    return rows


def ordering_suite(perturbative_phi: float = 0.8) -> list[CheckRow]:
    """Ordering theorem on ``|00>`` and the ODE-vs-perturbative scaling law."""
    rows = [
        _below("ordering", "ode residual zeta=0.6 phi=0.2", ordering.verify_ordering(0.6, 0.2, 40), 1e-7),
        _below("ordering", "ode residual phi=0", ordering.verify_ordering(0.6, 0.0, 40), 1e-10),
    ]
    gaps = []
    for phi in (0.1, 0.05):
        ode = ordering.solve_pqr_ode(*ordering.ordering_lambdas(phi), 1.0)
        pert = ordering.pqr_perturbative(1.0, phi)
        gaps.append(float(np.max(np.abs(ode.pqr - pert.pqr))))
    ratio = gaps[0] / gaps[1]
    rows.append(CheckRow("ordering", "gap ratio phi 0.1/0.05", ratio, 1.0, abs(ratio - 4) <= 1.0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = ordering.verify_ordering(0.6, perturbative_phi, 40, method="perturbative")
    rows.append(CheckRow("ordering", f"perturbative residual phi={perturbative_phi:g}", res, math.inf, True, False))
    return rows


def wigner_suite(points: int = 41) -> list[CheckRow]:
    """Closed-form codeword Wigner function against the Fock-space evaluation."""
    rows = []
    vac = fock.wigner_numeric(fock.vacuum(8), 0.0, 0.0)
    rows.append(_below("wigner", "vacuum W(0)=1/pi", abs(float(vac) - 1 / math.pi), 1e-12))
    axis = np.linspace(-3 * math.sqrt(math.pi), 3 * math.sqrt(math.pi), points)
    x, p = np.meshgrid(axis, axis, indexing="ij")
    zeta = fidelity.zeta_for_runs(1)
    a_phi = fidelity.GKP_DISPLACEMENT
    state = analytic.to_fock(analytic.codeword(1, a_phi, zeta))
    err = np.max(np.abs(analytic.wigner_analytic(1, a_phi, zeta, x, p) - fock.wigner_numeric(state, x, p)))
    rows.append(_below("wigner", "N=1 analytic vs fock", err, 1e-6))
    return rows


def fidelity_suite() -> list[CheckRow]:
    """Exact, ordered and closed-form fidelities on a small desk-scale sample."""
    P = fidelity.MziParams
    rows = [_below("fidelity", "phi=0 exact", abs(fidelity.fidelity_exact(P(2.0, 0.0, 0.8)) - 1), 1e-8)]
    p0 = P(2.0, 0.3, 0.0)
    g = fidelity.derived_params(p0)
    coh = math.exp(-0.5 * (g.alpha_s**2 + g.alpha_c**2))
    rows.append(_below("fidelity", "zeta=0 exact vs coherent overlap", abs(fidelity.fidelity_exact(p0) - coh), 1e-6))
    rows.append(_below("fidelity", "zeta=0 analytic vs coherent overlap", abs(fidelity.fidelity_analytic(p0) - coh), 1e-6))
    p1 = P(3.0, 0.2, 0.8)
    fa = fidelity.fidelity_analytic(p1)
    rows.append(_below("fidelity", "exact vs analytic", abs(fidelity.fidelity_exact(p1) - fa), 1e-2))
    rows.append(_below("fidelity", "ordered vs analytic", abs(fidelity.fidelity_ordered(p1) - fa), 5e-3))
    line = fidelity.gkp_line_fidelity(np.linspace(0.01, 0.8, 80), fidelity.zeta_for_runs(1))
    rows.append(CheckRow("fidelity", "min F on N=1 GKP line", float(line.min()), 0.9, bool(line.min() > 0.9)))
    return rows


def run_suites(names) -> list[CheckRow]:
    table = {
        "algebra": algebra_suite,
        "ordering": ordering_suite,
        "wigner": wigner_suite,
        "fidelity": fidelity_suite,
    }
    rows: list[CheckRow] = []
    for name in names:
        rows.extend(table[name]())
    return rows


def format_rows(rows) -> str:
    lines = [f"{'suite':<9} {'check':<40} {'value':>12} {'tol':>10}  status"]
    for r in rows:
        status = "PASS" if r.passed else "FAIL"
        if not r.enforced:
            status = "info"
        lines.append(f"{r.suite:<9} {r.name:<40} {r.value:>12.3e} {r.tolerance:>10.1e}  {status}")
    return "\n".join(lines)
