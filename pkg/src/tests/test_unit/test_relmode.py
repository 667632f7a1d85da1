import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from exceptions import BasisInadequacyError, ConfigurationError
from relmode.elements import (
    completeness_residual,
    dressed_power_elements,
    qubit_coefficients,
    spectrum_export,
)
from relmode.interaction import (
    InteractionParams,
    interaction_matrix_element,
    perturbative_coefficients,
    perturbative_energies,
)
from relmode.spectrum import diagonalize_relative, exact_energies, optimal_anharmonicity


def test_interaction_elements():
    u = 0.7
    assert interaction_matrix_element(0, 0, u) == pytest.approx(u)
    assert interaction_matrix_element(1, 1, u) == pytest.approx(u / 2.0)
    assert interaction_matrix_element(0, 1, u) == pytest.approx(-u / math.sqrt(2.0))
    assert interaction_matrix_element(3, 5, u) == pytest.approx(interaction_matrix_element(5, 3, u))


def test_interaction_rejects_negative_strength():
    with pytest.raises(ConfigurationError):
        InteractionParams(u_prime=-0.1)


def test_harmonic_ladder_without_interaction(harmonic_spectrum):
    assert np.allclose(harmonic_spectrum.energies, 2.0 * np.arange(harmonic_spectrum.dimension) + 0.5)
    assert harmonic_spectrum.omega_tilde == pytest.approx(2.0)
    assert harmonic_spectrum.anharmonicity == pytest.approx(0.0, abs=1e-14)


def test_harmonic_qubit_coefficients(harmonic_spectrum):
    """
    Dressed levels coincide with |0⟩, |2⟩, |4⟩ at u′ = 0.

    Expected:
    - c1 = −1, c2 = √2/2, c2′ = √3, c3 = 3√2/2 within 1e-12.
    """
    coefficients = qubit_coefficients(harmonic_spectrum)
    assert coefficients.c1 == pytest.approx(-1.0, abs=1e-12)
    assert coefficients.c2 == pytest.approx(math.sqrt(2.0) / 2.0, abs=1e-12)
    assert coefficients.c2p == pytest.approx(math.sqrt(3.0), abs=1e-12)
    assert coefficients.c3 == pytest.approx(1.5 * math.sqrt(2.0), abs=1e-12)


def test_odd_powers_vanish(squeezing_spectrum):
    assert not np.any(dressed_power_elements(squeezing_spectrum, 3))


def test_completeness_on_the_harmonic_ladder(harmonic_spectrum):
    assert completeness_residual(harmonic_spectrum) < 1e-12


def test_ground_energy_against_second_order():
    """
    Weak interaction against the perturbative series.

    Expected:
    - Ẽ₀(0.2) ≈ 0.6724 up to a third-order remainder.
    - The gap Ẽ₂ − Ẽ₀ at u′=0.36 lies near 1.9032.
    """
    assert exact_energies(0.2, 3)[0] == pytest.approx(0.6724, abs=0.01)
    assert perturbative_energies(0.2)[0] == pytest.approx(0.6724, abs=1e-12)
    energies = exact_energies(0.36, 3)
    assert energies[1] - energies[0] == pytest.approx(1.9032, abs=0.03)


@given(u_prime=st.floats(min_value=0.01, max_value=1.2, allow_nan=False))
def test_levels_stay_in_their_windows(u_prime):
    """
    One even level per harmonic window, first order as an upper bound for the ground state.

    Expected:
    - 2n + ½ ≤ Ẽ_n ≤ 2n + 3/2 and the levels are strictly increasing.
    - Ẽ₀ ≤ ½ + u′.
    """
    energies = exact_energies(u_prime, 6)
    lower = 2.0 * np.arange(6) + 0.5
    assert np.all(energies >= lower - 1e-12)
    assert np.all(energies <= lower + 1.0 + 1e-12)
    assert np.all(np.diff(energies) > 0)
    assert energies[0] <= 0.5 + u_prime + 1e-12


def test_ground_energy_grows_with_interaction():
    grid = np.linspace(0.0, 1.2, 13)
    grounds = [exact_energies(u, 1)[0] for u in grid]
    assert np.all(np.diff(grounds) > 0)


def test_anharmonicity_optimum():
    u_best, anharmonicity = optimal_anharmonicity()
    assert u_best == pytest.approx(0.61, abs=0.05)
    assert anharmonicity == pytest.approx(0.084, abs=0.005)


def test_exact_and_matrix_methods_agree_on_the_qubit_gap():
    exact = diagonalize_relative(0.36, 16, method="exact", n_expansion=1024)
    matrix = diagonalize_relative(0.36, 256, method="matrix", check_convergence=False)
    assert matrix.omega_tilde == pytest.approx(exact.omega_tilde, abs=0.01)
    assert matrix.energies[0] >= exact.energies[0] - 1e-12


def test_coefficients_follow_first_order_at_weak_interaction():
    spectrum = diagonalize_relative(0.05, 16, n_expansion=1024)
    reference = perturbative_coefficients(0.05)
    exact = qubit_coefficients(spectrum).to_dict()
    for name, value in reference.items():
        assert exact[name] == pytest.approx(value, abs=0.03), name


def test_spectrum_validation():
    with pytest.raises(ConfigurationError):
        diagonalize_relative(0.3, 4)
    with pytest.raises(ConfigurationError):
        diagonalize_relative(-0.3, 16)
    with pytest.raises(ConfigurationError):
        diagonalize_relative(0.3, 16, method="spline")
    spectrum = diagonalize_relative(0.3, 16, n_expansion=1024)
    with pytest.raises(BasisInadequacyError):
        spectrum.truncated(32)


def test_spectrum_export_keys(displacement_spectrum):
    exported = spectrum_export(displacement_spectrum)
    assert exported["u_prime"] == pytest.approx(0.86)
    assert exported["method"] == "exact"
    assert set(exported["coefficients"]) == {"c1", "c2", "c2p", "c3"}
    assert exported["omega_tilde_over_omega_x"] == pytest.approx(exported["energies"][1] - exported["energies"][0])


def test_second_order_energies_leave_a_cubic_remainder():
    """
    Exact levels against the quadratic series as u′ halves.

    Expected:
    - |Ẽ_exact − Ẽ_quadratic| / u′³ stays bounded for the three lowest even levels.
    """
    for u_prime in (0.2, 0.1, 0.05, 0.025):
        remainder = np.abs(exact_energies(u_prime, 3) - np.array(perturbative_energies(u_prime)))
        assert np.all(remainder / u_prime ** 3 < 5.0), u_prime


def test_every_level_grows_with_interaction():
    grid = np.linspace(0.0, 1.0, 50)
    levels = np.array([exact_energies(u, 6) for u in grid])
    assert np.all(np.diff(levels, axis=0) >= -1e-12)


def test_power_elements_are_shared_and_read_only(squeezing_spectrum):
    before = dict(vars(squeezing_spectrum))
    first = dressed_power_elements(squeezing_spectrum, 2)
    assert dressed_power_elements(squeezing_spectrum, 2) is first
    assert not first.flags.writeable
    assert vars(squeezing_spectrum).keys() == before.keys()
    with pytest.raises(ValueError):
        dressed_power_elements(squeezing_spectrum, -2)
