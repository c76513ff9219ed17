import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwgkp import fidelity
from qwgkp.exceptions import ConvergenceError, SingularityError, TruncationError
from qwgkp.fidelity import MziParams

from . import oracles


def test_params_validated():
    with pytest.raises(ValueError):
        MziParams(float("nan"), 0.1, 0.2)


def test_derived_params_at_zero_phase():
    g = fidelity.derived_params(MziParams(3.0, 0.0, 0.7))
    assert g.alpha_c == g.alpha_s == g.zeta_s == g.mu == g.kappa == 0
    assert g.zeta_c == 0.7


def test_alpha_s_series():
    g = fidelity.derived_params(MziParams(5.0, 0.2, 1.0))
    assert g.alpha_s == pytest.approx(5 * 0.1**3 / 6, rel=1e-3)


def test_mu_is_odd_in_phase():
    a = fidelity.derived_params(MziParams(2.0, 0.3, 1.0))
    b = fidelity.derived_params(MziParams(2.0, -0.3, 1.0))
    assert a.mu == -b.mu and a.alpha_c == b.alpha_c


def test_derived_params_singular_phase():
    with pytest.raises(SingularityError):
        fidelity.derived_params(MziParams(1.0, math.pi / 2, 0.5))


# --------------------------------------------------------------------------
# closed form


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 40), st.floats(1e-4, 0.99), st.floats(0, 1.5))
def test_analytic_even_and_bounded(alpha, phi, zeta):
    f = fidelity.fidelity_analytic(MziParams(alpha, phi, zeta))
    assert 0 < f <= 1
    assert f == pytest.approx(fidelity.fidelity_analytic(MziParams(alpha, -phi, zeta)), abs=1e-12)


def test_analytic_at_zero_phase():
    assert fidelity.fidelity_analytic(MziParams(7.0, 0.0, 1.0)) == 1.0


@pytest.mark.parametrize("alpha,phi", [(2.0, 0.3), (5.0, 0.4), (10.0, 0.1)])
def test_analytic_coherent_limit(alpha, phi):
    g = fidelity.derived_params(MziParams(alpha, phi, 0.0))
    ref = oracles.coherent_overlap(g.alpha_s, 0) * oracles.coherent_overlap(g.alpha_c, 0)
    assert fidelity.fidelity_analytic(MziParams(alpha, phi, 0.0)) == pytest.approx(ref, abs=1e-12)


def test_analytic_warns_beyond_small_phase():
    with pytest.warns(UserWarning):
        fidelity.fidelity_analytic(MziParams(1.0, 1.2, 0.5))


def test_analytic_approaches_one_quadratically():
    # fixed alpha * phi, phi over one decade
    phis = np.array([0.02, 0.05, 0.1, 0.2])
    infid = [1 - fidelity.fidelity_analytic(MziParams(1.0 / p, p, 0.8)) for p in phis]
    slope = np.polyfit(np.log(phis), np.log(infid), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.15)


def test_gkp_point_above_ninety_percent():
    p = MziParams(fidelity.gkp_alpha(0.5), 0.5, fidelity.zeta_for_runs(1))
    assert fidelity.fidelity_analytic(p) > 0.9


# --------------------------------------------------------------------------
# exact and ordered evaluations


@pytest.mark.parametrize("alpha,phi,zeta", [(1.0, 0.1, 0.3), (2.0, 0.3, 0.8), (3.0, 0.2, 1.2), (1.5, 0.6, 0.5)])
def test_exact_matches_gaussian_oracle(alpha, phi, zeta):
    p = MziParams(alpha, phi, zeta)
    assert fidelity.fidelity_exact(p) == pytest.approx(oracles.mzi_output_fidelity(alpha, phi, zeta), abs=1e-8)


def test_exact_zero_phase():
    assert fidelity.fidelity_exact(MziParams(2.0, 0.0, 0.8)) == pytest.approx(1.0, abs=1e-8)


def test_exact_coherent_limit():
    p = MziParams(2.0, 0.3, 0.0)
    g = fidelity.derived_params(p)
    assert fidelity.fidelity_exact(p) == pytest.approx(math.exp(-0.5 * (g.alpha_s**2 + g.alpha_c**2)), abs=1e-6)


def test_exact_close_to_analytic():
    p = MziParams(3.0, 0.2, 0.8)
    assert abs(fidelity.fidelity_exact(p) - fidelity.fidelity_analytic(p)) < 0.01


def test_exact_convergence_check_and_phase_log(caplog):
    with caplog.at_level(logging.DEBUG, logger="qwgkp.fidelity"):
        f = fidelity.fidelity_exact(MziParams(1.0, 0.2, 0.4), check_convergence=True)
    assert 0.99 < f <= 1
    assert "overlap phase" in caplog.text


def test_exact_detects_unconverged_cutoff(monkeypatch):
    calls = iter([0.5, 0.6])
    monkeypatch.setattr(fidelity, "exact_overlap", lambda params, dim=None: next(calls))
    with pytest.raises(ConvergenceError):
        fidelity.fidelity_exact(MziParams(1.0, 0.2, 0.4), 20, check_convergence=True)


def test_exact_rejects_small_cutoff():
    with pytest.raises(TruncationError):
        fidelity.fidelity_exact(MziParams(3.0, 0.3, 1.0), 16)


@pytest.mark.parametrize("alpha,phi,zeta", [(2.0, 0.25, 1.0), (3.0, 0.3, 1.2), (1.0, 0.05, 0.3)])
def test_ordered_close_to_analytic(alpha, phi, zeta):
    p = MziParams(alpha, phi, zeta)
    assert abs(fidelity.fidelity_ordered(p) - fidelity.fidelity_analytic(p)) < 5e-3


def test_ordered_limits():
    assert fidelity.fidelity_ordered(MziParams(2.0, 0.0, 0.8)) == pytest.approx(1.0, abs=1e-10)
    p = MziParams(2.0, 0.3, 0.0)
    assert fidelity.fidelity_ordered(p) == pytest.approx(fidelity.fidelity_analytic(p), abs=1e-10)


# --------------------------------------------------------------------------
# helpers and grids


@pytest.mark.parametrize("n,db", [(1, 4.97), (3, 9.74), (5, 11.96), (7, 13.42)])
def test_squeezing_db(n, db):
    assert fidelity.squeezing_db(fidelity.zeta_for_runs(n)) == pytest.approx(db, abs=0.01)


def test_squeezing_db_definition():
    assert fidelity.squeezing_db(0.0) == 0.0
    assert fidelity.squeezing_db(0.4) == pytest.approx(10 * math.log10(math.exp(0.8)))


@pytest.mark.parametrize("f,n,m,expected", [(0.9, 3, 1, 0.729), (0.99, 3, 1, 0.970299), (1.0, 5, 2, 1.0), (0.9, 1, 3, 0.729)])
def test_codeword_fidelity_estimate(f, n, m, expected):
    assert fidelity.codeword_fidelity_estimate(f, n, m) == pytest.approx(expected)


def test_codeword_fidelity_estimate_range():
    with pytest.raises(ValueError):
        fidelity.codeword_fidelity_estimate(1.2, 1)


def test_grid_layout_and_flags():
    alphas = np.linspace(2, 40, 20)
    phis = np.linspace(0.04, 0.8, 20)
    g = fidelity.fidelity_grid(alphas, phis, fidelity.zeta_for_runs(1))
    assert g.dtype.names == ("alpha", "phi", "zeta", "fidelity", "on_gkp_line")
    assert len(g) == 400
    assert np.array_equal(g["alpha"][:20], np.full(20, alphas[0]))
    assert np.array_equal(g["phi"][:20], phis)
    flagged = g[g["on_gkp_line"]]
    assert len(flagged) > 0
    assert np.all(np.abs(flagged["alpha"] * flagged["phi"] / 2 - fidelity.GKP_DISPLACEMENT) < 0.5)
    assert np.all(flagged["fidelity"] > 0.9)


def test_grid_symmetric_in_phase():
    alphas = [3.0, 9.0]
    g = fidelity.fidelity_grid(alphas, [-0.5, -0.2, 0.2, 0.5], 1.0)
    f = g["fidelity"].reshape(2, 4)
    assert np.allclose(f, f[:, ::-1], atol=1e-12)


def test_grid_exact_method_with_jobs():
    g = fidelity.fidelity_grid([1.0, 2.0], [0.1, 0.2], 0.3, method="exact", jobs=2)
    a = fidelity.fidelity_grid([1.0, 2.0], [0.1, 0.2], 0.3)
    assert np.allclose(g["fidelity"], a["fidelity"], atol=1e-3)


def test_more_squeezing_lowers_fidelity_at_fixed_point():
    z1, z7 = fidelity.zeta_for_runs(1), fidelity.zeta_for_runs(7)
    for alpha in (4.0, 8.0, 12.0):
        assert fidelity.fidelity_analytic(MziParams(alpha, 0.4, z7)) < fidelity.fidelity_analytic(MziParams(alpha, 0.4, z1))
