import math

import numpy as np
import pytest

from dynamics.basis import MotionalState, ProductBasis
from exceptions import BasisInadequacyError, ConfigurationError
from tomoscope import (
    CharGrid,
    ModePairState,
    apply_protocol,
    cat_state,
    coherent_characteristic,
    coherent_state,
    com_density,
    direct_grid,
    joint_sz,
    reconstruct,
    sample,
    squeezed_state,
    symmetric_axis,
    vacuum_state,
    wigner_direct,
    wigner_from_char,
)

N_COM = 24


def closed_form_grid(alpha: complex, extent: float, spacing: float = 0.25) -> CharGrid:
    axis = symmetric_axis(extent, spacing)
    real, imag = np.meshgrid(axis, axis, indexing="ij")
    beta = real + 1j * imag
    return CharGrid(axis=axis, chi_com=coherent_characteristic(alpha, beta),
                    chi_rel=np.exp(-0.5 * np.abs(beta) ** 2))


@pytest.fixture(scope="module")
def coherent_grid():
    """Reconstructed χ of a coherent state on a coarse 7 x 7 grid."""
    alpha = 0.5 + 0.3j
    state = coherent_state(alpha, N_COM)
    axis = symmetric_axis(1.5, 0.5)
    return alpha, state, reconstruct(state, axis)


def test_zero_force_leaves_every_branch_unchanged():
    state = coherent_state(0.4 - 0.2j, N_COM)
    result = apply_protocol(state, 0.0, 0.0)
    expected = 0.5 * state.padded(60, 60).amplitudes
    for label in ("++", "+-", "-+", "--"):
        assert np.allclose(result.branch(label), expected, atol=1e-14)


def test_branches_share_the_weight_equally():
    result = apply_protocol(vacuum_state(N_COM), 0.3 - 0.1j, 0.7)
    assert np.allclose(result.branch_weights(), 0.25, atol=1e-12)
    assert result.norm == pytest.approx(1.0, abs=1e-12)


def test_joint_spin_signal_of_the_vacuum():
    """
    Both modes in their ground states, β′ = 1 and θ = 0.

    Expected:
    - ½e^{−1/2} + ½e^{−1/2} ≈ 0.6065.
    """
    assert sample(vacuum_state(N_COM), 1.0, 0.0).expectation == pytest.approx(math.exp(-0.5), abs=1e-10)
    assert joint_sz(apply_protocol(vacuum_state(N_COM), 0.0, 0.0)) == pytest.approx(1.0)


def test_probe_angle_is_pi_periodic():
    state = coherent_state(0.8 + 0.4j, N_COM)
    first = sample(state, 0.6 + 0.5j, 0.3).expectation
    second = sample(state, 0.6 + 0.5j, 0.3 + math.pi).expectation
    assert first == pytest.approx(second, abs=1e-12)


def test_reconstruction_matches_the_direct_inner_product(coherent_grid):
    _, state, grid = coherent_grid
    assert np.allclose(grid.chi_com, direct_grid(state, grid.axis), atol=1e-10)


def test_reconstruction_matches_the_coherent_oracle(coherent_grid):
    alpha, _, grid = coherent_grid
    beta = grid.beta_prime
    assert np.allclose(grid.chi_com, coherent_characteristic(alpha, beta), atol=1e-8)
    assert np.allclose(grid.chi_rel, np.exp(-0.5 * np.abs(beta) ** 2), atol=1e-8)


def test_characteristic_function_identities(coherent_grid):
    _, _, grid = coherent_grid
    centre = grid.axis.size // 2
    assert grid.chi_com[centre, centre] == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(grid.chi_com[::-1, ::-1], np.conj(grid.chi_com), atol=1e-10)
    assert len(list(grid.rows())) == grid.axis.size ** 2


def test_reconstruction_needs_a_symmetric_axis():
    with pytest.raises(ConfigurationError):
        reconstruct(vacuum_state(N_COM), np.array([0.0, 0.5, 1.0]))


def test_vacuum_wigner_peak_and_normalization():
    """
    Transform of the vacuum χ on a ±6 grid with spacing 0.25.

    Expected:
    - Peak 2/π at the origin within 1e-3.
    - Unit normalization within 1e-3.
    """
    wigner = wigner_from_char(closed_form_grid(0.0, 6.0))
    position, value = wigner.peak()
    assert position == 0
    assert value == pytest.approx(2.0 / math.pi, abs=1e-3)
    assert wigner.normalization == pytest.approx(1.0, abs=1e-3)
    assert wigner.imaginary_residual < 1e-8
    assert wigner.warnings == []


def test_coherent_wigner_peaks_at_alpha():
    wigner = wigner_from_char(closed_form_grid(1.0, 6.0), max_alpha=1.0)
    position, _ = wigner.peak()
    assert abs(position - 1.0) <= wigner.spacing


def test_wigner_warnings():
    wigner = wigner_from_char(closed_form_grid(0.0, 2.0))
    assert any("aliased" in message for message in wigner.warnings)
    assert any("extent" in message for message in wigner.warnings)
    with pytest.raises(ConfigurationError):
        wigner_from_char(closed_form_grid(0.0, 3.0, spacing=0.5))


def test_odd_cat_has_a_negative_wigner_function():
    """
    χ of (|α⟩ − |−α⟩)/N with α = 1 from the direct inner product.

    Expected:
    - W(0) = −2/π, matching the parity formula within 1e-3.
    """
    state = cat_state(1.0, N_COM, parity=-1)
    axis = symmetric_axis(6.0, 0.25)
    grid = CharGrid(axis=axis, chi_com=direct_grid(state, axis), chi_rel=np.zeros((axis.size, axis.size)))
    wigner = wigner_from_char(grid, max_alpha=1.0)
    centre = axis.size // 2
    parity_value = wigner_direct(com_density(state), np.array([0.0]))[0, 0]
    assert parity_value == pytest.approx(-2.0 / math.pi, abs=1e-10)
    assert wigner.values[centre, centre] == pytest.approx(parity_value, abs=1e-3)
    assert wigner.minimum < -0.5


def test_squeezed_state_is_normalized_and_even():
    state = squeezed_state(0.4, N_COM)
    assert state.norm == pytest.approx(1.0)
    assert np.allclose(state.amplitudes[1::2, 0], 0.0)


def test_gate_states_map_onto_the_relative_ladder(harmonic_spectrum):
    basis = ProductBasis(n_com=8, n_rel=3)
    motional = MotionalState.coherent(basis, 0.5, qubit=(1.0, 1.0))
    identified = ModePairState.from_motional(motional, n_rel=5)
    expanded = ModePairState.from_motional(motional, n_rel=5, spectrum=harmonic_spectrum)
    assert np.allclose(identified.amplitudes, expanded.amplitudes)
    assert np.allclose(identified.amplitudes[:, 1::2], 0.0)
    with pytest.raises(BasisInadequacyError):
        ModePairState.from_motional(motional, n_rel=4)


def test_coherent_state_guards_the_cutoff():
    with pytest.raises(BasisInadequacyError):
        coherent_state(3.0, 8)
