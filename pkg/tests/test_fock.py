import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwgkp import fock
from qwgkp.exceptions import DegenerateConditionError, TruncationError

from . import oracles

amplitudes = st.floats(-2.0, 2.0, allow_nan=False)


# --------------------------------------------------------------------------
# FockState


def test_state_is_frozen_copy():
    raw = np.array([1.0, 0.0, 0.0])
    s = fock.FockState(raw, normalized=True)
    raw[0] = 0.0
    assert s.amplitudes[0] == 1.0
    with pytest.raises(ValueError):
        s.amplitudes[0] = 2.0


@pytest.mark.parametrize("bad", [[np.nan, 0.0], [2.0, 0.0], np.zeros((2, 2, 2))])
def test_state_rejects_invalid(bad):
    with pytest.raises(ValueError):
        fock.FockState(np.asarray(bad, dtype=complex))


def test_normalized_flag_checked():
    with pytest.raises(ValueError):
        fock.FockState([0.5, 0.0], normalized=True)


def test_serialization_round_trip():
    s = fock.tensor(fock.coherent_state(0.7 + 0.2j, 12), fock.number_state(1, 5))
    back = fock.FockState.from_dict(s.to_dict())
    assert back.dims == s.dims
    assert np.array_equal(back.amplitudes, s.amplitudes)


def test_truncate_refuses_to_drop_weight():
    s = fock.coherent_state(2.0, 30)
    assert s.truncate(25).dims == (25,)
    with pytest.raises(TruncationError):
        s.truncate(5)


def test_tail_flag():
    assert not fock.coherent_state(1.0, 20).tail_flagged
    assert fock.FockState(np.ones(10) / math.sqrt(10)).tail_flagged


# --------------------------------------------------------------------------
# gates


@pytest.mark.parametrize("alpha", [0.3, 1.0, 1.5 - 0.5j, -2.0])
def test_displacement_vacuum_column_is_coherent_state(alpha):
    d = fock.coherent_dim(alpha)
    op = fock.displacement_operator(alpha, d)
    col = op.matrix[:, 0]
    ref = fock.coherent_amplitudes(alpha, d)
    half = d // 2
    assert np.max(np.abs(col[:half] - ref[:half])) < 1e-12
    assert abs(np.vdot(ref, col)) / np.linalg.norm(ref) / np.linalg.norm(col) > 1 - 1e-12
    assert op.unitarity_residual < 1e-10


def test_displacement_matrix_element():
    assert abs(fock.displacement_operator(1.0, 20).matrix[0, 0] - math.exp(-0.5)) < 1e-12


def test_displacement_needs_room():
    with pytest.raises(TruncationError):
        fock.displacement_operator(3.0, 10)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0 - 1.0j])
def test_displacement_moves_mean_amplitude(alpha):
    d = fock.coherent_dim(alpha)
    s = fock.apply(fock.displacement_operator(alpha, d), fock.vacuum(d))
    assert abs(fock.mode_means(s)[0] - alpha) < 1e-9


@pytest.mark.parametrize("zeta", [0.2, 0.5 * math.log(math.pi), 1.0])
def test_squeezing_variances(zeta):
    d = fock.squeezed_dim(zeta)
    s = fock.apply(fock.squeeze_operator(zeta, d), fock.vacuum(d))
    vx, vp = oracles.squeezed_cov(zeta)
    assert abs(fock.quadrature_variance(s, "x") - vx) < 1e-9
    assert abs(fock.quadrature_variance(s, "p") - vp) < 1e-8


def test_squeezing_by_log_pi_gives_ratio_one_over_pi():
    zeta = 0.5 * math.log(math.pi)
    d = fock.squeezed_dim(zeta)
    s = fock.apply(fock.squeeze_operator(zeta, d), fock.vacuum(d))
    assert abs(fock.quadrature_variance(s, "x") / 0.5 - 1 / math.pi) < 1e-9


def test_squeezed_amplitudes_match_closed_form_probabilities():
    zeta, d = 0.8, 80
    s = fock.apply(fock.squeeze_operator(zeta, d), fock.vacuum(d))
    assert np.allclose(s.marginal(), fock.squeezed_vacuum_probabilities(zeta, d), atol=1e-12)


def test_squeeze_needs_room():
    with pytest.raises(TruncationError):
        fock.squeeze_operator(1.5, 10)


@pytest.mark.parametrize("phi", [0.0, 0.3, 1.2, math.pi / 2])
def test_mzi_unitary_is_unitary_on_interior(phi):
    assert fock.mzi_unitary(phi, (10, 10)).unitarity_residual < 1e-10


def test_mzi_needs_equal_cutoffs():
    with pytest.raises(ValueError):
        fock.mzi_unitary(0.3, (10, 12))


@settings(max_examples=25, deadline=None)
@given(amplitudes, amplitudes, amplitudes, amplitudes, st.floats(-math.pi, math.pi))
def test_mzi_moves_coherent_amplitudes_by_mode_matrix(b1, b2, g1, g2, phi):
    beta, gamma = complex(b1, b2) / 2, complex(g1, g2) / 2
    d = 24
    state = fock.tensor(fock.coherent_state(beta, d), fock.coherent_state(gamma, d))
    out = fock.apply(fock.mzi_unitary(phi, (d, d)), state)
    expected = fock.mzi_mode_matrix(phi) @ np.array([beta, gamma])
    assert np.allclose(fock.mode_means(out), expected, atol=1e-8)


def test_mzi_mode_matrix_has_determinant_minus_one():
    m = fock.mzi_mode_matrix(0.7)
    assert abs(np.linalg.det(m) + 1) < 1e-14
    assert np.allclose(m @ m, np.eye(2))


def test_mzi_swaps_at_zero_phase():
    d = 12
    state = fock.tensor(fock.number_state(2, d), fock.number_state(1, d))
    out = fock.apply(fock.mzi_unitary(0.0, (d, d)), state)
    assert abs(abs(out.amplitudes[1, 2]) - 1) < 1e-12


# --------------------------------------------------------------------------
# conditioning


def test_parity_projection_of_cat_is_complete():
    cat = fock.FockState(fock.cat_amplitudes(2.0, 40), normalized=True)
    _, prob = fock.project_parity(fock.tensor(fock.vacuum(3), cat), 1, "even")
    assert abs(prob - 1) < 1e-12


@pytest.mark.parametrize("condition", ["even", "cat"])
def test_conditioning_product_with_cat(condition):
    psi = fock.coherent_state(0.4 + 0.3j, 30)
    cat = fock.FockState(fock.cat_amplitudes(1.5, 30), normalized=True)
    res = fock.conditional_state(fock.tensor(psi, cat), 1, condition, alpha=1.5)
    assert abs(res.probability - 1) < 1e-10
    assert fock.fidelity(res.state, psi) > 1 - 1e-10
    assert res.purity > 1 - 1e-10


def test_even_conditioning_zero_probability_raises():
    state = fock.tensor(fock.vacuum(4), fock.number_state(1, 4))
    with pytest.raises(DegenerateConditionError):
        fock.conditional_state(state, 1, "even")


def test_conditioning_modes_agree_on_ideal_map_output():
    alpha, a_phi, zeta, d = 3.0, 0.15, 0.3, 60
    from qwgkp.analytic import Superposition, to_fock

    plus = to_fock(Superposition.from_arrays([1.0], [a_phi], zeta), d)
    minus = to_fock(Superposition.from_arrays([1.0], [-a_phi], zeta), d)
    amps = (
        np.outer(plus.amplitudes, fock.coherent_amplitudes(alpha, d))
        + np.outer(minus.amplitudes, fock.coherent_amplitudes(-alpha, d))
    )
    state = fock.FockState(amps / np.linalg.norm(amps), normalized=True)
    even = fock.conditional_state(state, 1, "even")
    cat = fock.conditional_state(state, 1, "cat", alpha=alpha)
    assert even.purity > 1 - 1e-8
    assert 1 - fock.fidelity(even.state, cat.state) < 1e-10


def test_swap_modes_round_trip():
    s = fock.tensor(fock.coherent_state(0.5, 10), fock.number_state(2, 6))
    back = fock.swap_modes(fock.swap_modes(s))
    assert np.array_equal(back.amplitudes, s.amplitudes)
    assert fock.swap_modes(s).dims == (6, 10)


# --------------------------------------------------------------------------
# observables


@pytest.mark.parametrize("n", [0, 1, 4, 9])
def test_hermite_functions_match_scipy(n):
    x = np.linspace(-4, 4, 33)
    assert np.allclose(fock.hermite_functions(n + 1, x)[n], oracles.fock_wavefunction(n, x), atol=1e-12)


def test_vacuum_wigner_origin():
    assert abs(fock.wigner_numeric(fock.vacuum(6), 0.0, 0.0) - 1 / math.pi) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_number_state_wigner_against_quadrature(n):
    s = fock.number_state(n, 8)
    for x, p in [(0.0, 0.0), (0.7, -0.4), (1.3, 1.1)]:
        ref = oracles.wigner_quadrature(lambda t: float(oracles.fock_wavefunction(n, t)), x, p)
        assert abs(fock.wigner_numeric(s, x, p) - ref) < 1e-9


def test_parity_of_number_states():
    assert fock.parity_expectation(fock.number_state(3, 6)) == pytest.approx(-1)
    assert fock.parity_expectation(fock.number_state(4, 6)) == pytest.approx(1)


def test_position_peaks_of_displaced_state():
    s = fock.coherent_state(1.2, fock.coherent_dim(1.2))
    assert np.allclose(fock.position_peaks(s, -5, 5), [math.sqrt(2) * 1.2], atol=1e-7)
