import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from beamforge.coefficients import (
    axial_coefficient,
    build_coeff_matrix,
    g_integral,
    taylor_coefficients_by_contour,
)
from beamforge.depths import (
    Tone,
    Waveform,
    base_depths_for,
    build_schedule,
    modulation_limit,
    solve_depths_general,
    solve_depths_symmetric,
)
from beamforge.geometry import BeamGeometry, TrapLayout
from beamforge.potential import effective_potential
from exceptions import ConfigurationError, InfeasibleDepthError, SeriesConvergenceError


@pytest.fixture(scope="module")
def flat_geometry(geometry):
    """Transverse corrections pushed to the smallest admissible values."""
    return BeamGeometry(
        waist=geometry.waist,
        rayleigh_ratio=1e-9,
        eps_x=geometry.eps_x,
        eps_y=1e-9,
        omega_x=geometry.omega_x,
        mass=geometry.mass,
    )


def test_g_integral_is_one_without_powers():
    assert g_integral(0, 0.3) == 1.0
    assert g_integral(4, 0.0) == 1.0


def test_g_integral_matches_small_a_expansion():
    """
    Expand (1 + a²x²)^{-1} term by term for the Rayleigh ratio of the shipped trap.

    Expected:
    - 1 − a²/2 + 3a⁴/4 to well within the next term.
    """
    a = 0.014
    assert g_integral(1, a) == pytest.approx(1.0 - a ** 2 / 2.0 + 0.75 * a ** 4, abs=1e-10)


def test_pure_gaussian_coefficients(flat_geometry):
    assert axial_coefficient(0, 0.0, flat_geometry) == pytest.approx(-1.0, abs=1e-12)
    assert axial_coefficient(2, 0.0, flat_geometry) == pytest.approx(2.0, abs=1e-12)
    assert axial_coefficient(1, 0.5, flat_geometry) == pytest.approx(-2.0 * math.exp(-0.5), abs=1e-10)


@given(
    m=st.integers(min_value=0, max_value=8),
    zeta=st.floats(min_value=0.0, max_value=1.5, allow_nan=False),
)
def test_coefficients_have_exact_parity(geometry, m, zeta):
    forward = axial_coefficient(m, zeta, geometry)
    mirrored = axial_coefficient(m, -zeta, geometry)
    assert mirrored == pytest.approx((-1) ** m * forward, abs=1e-12)


def test_series_agrees_with_quadrature_contour(geometry):
    zeta = 0.56
    reference = taylor_coefficients_by_contour(zeta, geometry, max_order=6)
    series = np.array([axial_coefficient(m, zeta, geometry) for m in range(7)])
    assert np.allclose(series, reference, atol=1e-8)


def test_series_refuses_far_beams(geometry):
    with pytest.raises(SeriesConvergenceError):
        axial_coefficient(2, 3.0, geometry)


def test_three_beam_base_depths(geometry):
    """
    Solve the symmetric three-beam layout for a purely harmonic trap.

    Expected:
    - Side and centre depths reproduce (1.76, 2.17, 1.76) V0 within 3%.
    - The static potential keeps the mirror symmetry.
    """
    schedule = solve_depths_symmetric(2.0, 0.0, 0.6775, geometry)
    assert np.allclose(schedule.base_depths, [1.76, 2.17, 1.76], rtol=0.03)
    assert schedule.base_depths[0] == schedule.base_depths[2]


def test_three_beam_forward_check(geometry, three_beam):
    matrix = build_coeff_matrix(three_beam, geometry)
    amplitudes = matrix.amplitudes(three_beam.base_depths)
    assert np.allclose(amplitudes, [0.0, 2.0, 0.0, 0.0, 0.0], atol=0.04)


def test_general_solve_round_trips_targets(geometry, five_beam):
    target = np.array([0.05, 2.0, 0.0, 0.0, 0.0])
    schedule = solve_depths_general(target, five_beam, geometry)
    matrix = build_coeff_matrix(five_beam, geometry)
    assert np.allclose(matrix.amplitudes(schedule.base_depths), target, atol=1e-9)


def test_general_solve_rejects_negative_depths(geometry, five_beam):
    with pytest.raises(InfeasibleDepthError) as exc_info:
        solve_depths_general([0.0, -2.0, 0.0, 0.0, 0.0], five_beam, geometry)
    assert exc_info.value.exit_code == 2
    assert 0 <= exc_info.value.beam < 5


def test_symmetric_potential_is_even(geometry, three_beam):
    x = np.array([0.05, 0.1, 0.2])
    right = effective_potential(x, three_beam.base_depths, three_beam.positions, geometry)
    left = effective_potential(-x, three_beam.base_depths, three_beam.positions, geometry)
    assert np.allclose(right.value, left.value, atol=1e-12)


def test_harmonic_base_potential(geometry, three_beam):
    """
    The harmonic base layout near the trap centre.

    Expected:
    - V(x′) − V(0) ≈ 2 V0 x′² within 1e-3 V0 at x′ = 0.1.
    """
    potential = effective_potential(np.array([0.0, 0.1]), three_beam.base_depths, three_beam.positions, geometry)
    assert potential.value[1] - potential.value[0] == pytest.approx(2.0 * 0.1 ** 2, abs=1e-3)


def test_schedule_positivity_is_enforced(geometry, three_beam):
    waveforms = (Waveform(2, 5.0, (Tone(2.0),)),)
    safe = build_schedule(three_beam, geometry, waveforms, lam=0.1, duration=10.0)
    limit = modulation_limit(safe)
    assert 0.1 < limit < math.inf
    with pytest.raises(InfeasibleDepthError):
        build_schedule(three_beam, geometry, waveforms, lam=min(0.99, 1.5 * limit), duration=10.0)


def test_symmetric_layout_cannot_drive_odd_orders(geometry, three_beam):
    with pytest.raises(ConfigurationError):
        build_schedule(three_beam, geometry, (Waveform(1, 1.0, (Tone(1.0),)),), lam=0.1, duration=1.0)


def test_layout_validation():
    with pytest.raises(ConfigurationError):
        TrapLayout(positions=(-0.5, 0.0, 0.4), symmetric=True)
    with pytest.raises(ConfigurationError):
        TrapLayout(positions=(0.1, 0.1))


def test_single_centred_beam_has_no_linear_term_and_no_harmonic_solve(geometry):
    """
    A lone beam at ζ = 0 controlling order 1 only.

    Expected:
    - C = [0]: the linear coefficient vanishes at the beam centre.
    - Base depths cannot be solved, since no harmonic order is controlled.
    """
    layout = TrapLayout(positions=(0.0,), k_max=1, name="single")
    matrix = build_coeff_matrix(layout, geometry)
    assert matrix.entries.shape == (1, 1)
    assert matrix.entries[0, 0] == 0.0
    assert matrix.condition_number == math.inf
    with pytest.raises(ConfigurationError):
        base_depths_for(layout, geometry)
