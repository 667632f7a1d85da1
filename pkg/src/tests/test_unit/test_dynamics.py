import math

import numpy as np
import pytest

from beamforge.depths import Tone, Waveform, build_schedule
from dynamics.assembly import DriveAssembly, OperatorTerm, assemble, expand_symmetric_power
from dynamics.basis import (
    MotionalState,
    ProductBasis,
    coherent_amplitudes,
    com_position_power,
    observables,
)
from dynamics.propagator import PropagatorConfig, gate_fidelity, propagate
from exceptions import BasisInadequacyError, ConfigurationError, CutoffPopulationError


def test_symmetric_power_expansion():
    """
    Σᵢ xᵢ^k with x₁,₂ = (R ± r)/√2.

    Expected:
    - k=1 → √2 R.
    - k=2 → R² + r².
    - k=3 → (R³ + 3Rr²)/√2.
    """
    assert expand_symmetric_power(1) == [(pytest.approx(math.sqrt(2.0)), 1, 0)]
    assert expand_symmetric_power(2) == [(pytest.approx(1.0), 2, 0), (pytest.approx(1.0), 0, 2)]
    assert expand_symmetric_power(3) == [
        (pytest.approx(1.0 / math.sqrt(2.0)), 3, 0),
        (pytest.approx(3.0 / math.sqrt(2.0)), 1, 2),
    ]


def test_position_power_is_exact_on_kept_states():
    squared = com_position_power(6, 2)
    assert np.allclose(np.diag(squared), np.arange(6) + 0.5)
    assert squared[0, 2] == pytest.approx(math.sqrt(2.0) / 2.0)


def test_product_basis_indexing():
    basis = ProductBasis(n_com=5, n_rel=3)
    assert basis.index(2, 1) == 7
    assert basis.unpack(7) == (2, 1)
    with pytest.raises(IndexError):
        basis.index(5, 0)


def test_coherent_observables():
    basis = ProductBasis(n_com=40, n_rel=2)
    alpha = 1.2 - 0.5j
    state = MotionalState.coherent(basis, alpha)
    values = observables(state)
    assert values.mean_lowering == pytest.approx(alpha, abs=1e-10)
    assert values.mean_phonons == pytest.approx(abs(alpha) ** 2, abs=1e-10)
    assert values.mean_position == pytest.approx(math.sqrt(2.0) * alpha.real, abs=1e-10)
    assert values.population_up == pytest.approx(1.0)
    assert values.leakage == 0.0


def test_coherent_state_guards_the_cutoff():
    with pytest.raises(BasisInadequacyError):
        MotionalState.coherent(ProductBasis(n_com=8, n_rel=2), 3.0)
    assert np.linalg.norm(coherent_amplitudes(0.7j, 30)) == pytest.approx(1.0)


def test_operator_terms_must_be_hermitian():
    with pytest.raises(ConfigurationError):
        OperatorTerm(matrix=np.array([[0.0, 1.0], [0.0, 0.0]]), tag="raising")


@pytest.fixture(scope="module")
def squeezing_assembly(settings, geometry, three_beam, squeezing_spectrum):
    waveforms = (Waveform(2, 1.0, (Tone(2.0, 0.0, -1.0),)),)
    schedule = build_schedule(three_beam, geometry, waveforms, lam=0.05, duration=4.0)
    basis = ProductBasis(n_com=settings.K_SIM, n_rel=4)
    return assemble(schedule, squeezing_spectrum, geometry, basis, k_sim=settings.K_SIM)


def test_assembled_hamiltonian_is_hermitian(squeezing_assembly):
    hamiltonian = squeezing_assembly.hamiltonian(0.37)
    assert np.allclose(hamiltonian, hamiltonian.conj().T, atol=1e-13)
    assert squeezing_assembly.fastest_frequency == pytest.approx(2.0)


def test_assembly_needs_room_for_the_highest_order(geometry, three_beam, squeezing_spectrum):
    schedule = build_schedule(three_beam, geometry, (), lam=0.0, duration=1.0)
    with pytest.raises(BasisInadequacyError):
        assemble(schedule, squeezing_spectrum, geometry, ProductBasis(n_com=10, n_rel=2), k_sim=14)


def test_zero_duration_leaves_the_state(squeezing_assembly):
    state = MotionalState.coherent(squeezing_assembly.basis, 0.3)
    final, diagnostics = propagate(state, squeezing_assembly, 0.0)
    assert np.array_equal(final.amplitudes, state.amplitudes)
    assert diagnostics.steps == 0
    assert final.time == 0.0


def test_free_evolution_matches_the_interaction_frame(harmonic_spectrum):
    """
    Without static or driven terms the lab-frame evolution is exp(−iH₀τ).

    Expected:
    - Rotating back with exp(iH₀τ) returns the initial state to 1e-12.
    """
    basis = ProductBasis(n_com=12, n_rel=3)
    diagonal = np.repeat(np.arange(12.0), 3) + np.tile(harmonic_spectrum.energies[:3], 12)
    assembly = DriveAssembly(basis=basis, h0_diagonal=diagonal)
    rng = np.random.default_rng(7)
    amplitudes = rng.normal(size=basis.dimension) + 1j * rng.normal(size=basis.dimension)
    state = MotionalState(amplitudes / np.linalg.norm(amplitudes), basis)
    final, diagnostics = propagate(state, assembly, 3.7, PropagatorConfig(order=2))
    assert np.allclose(np.exp(1j * diagonal * 3.7) * final.amplitudes, state.amplitudes, atol=1e-12)
    assert gate_fidelity(final, np.eye(basis.dimension), state, diagonal, 3.7) == pytest.approx(1.0, abs=1e-12)
    assert diagnostics.norm_drift < 1e-12


def test_driven_evolution_keeps_the_norm(squeezing_assembly):
    state = MotionalState.ground(squeezing_assembly.basis)
    final, diagnostics = propagate(state, squeezing_assembly, 4.0)
    assert final.norm == pytest.approx(1.0, abs=1e-10)
    assert diagnostics.steps >= 4.0 * 2.0 / (2.0 * math.pi) * 64


def test_strict_mode_fails_on_cutoff_population():
    basis = ProductBasis(n_com=4, n_rel=2)
    assembly = DriveAssembly(basis=basis, h0_diagonal=np.repeat(np.arange(4.0), 2) + 0.5)
    com = np.full(4, 0.5, dtype=complex)
    state = MotionalState.product(basis, com, [1.0, 0.0])
    with pytest.raises(CutoffPopulationError) as exc_info:
        propagate(state, assembly, 1.0, PropagatorConfig(strict=True))
    assert exc_info.value.exit_code == 3


def test_propagator_config_validation():
    with pytest.raises(ConfigurationError):
        PropagatorConfig(steps_per_period=20)
    with pytest.raises(ConfigurationError):
        PropagatorConfig(order=3)
