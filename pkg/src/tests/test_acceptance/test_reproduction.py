import math

import numpy as np
import pytest

from beamforge.coefficients import build_coeff_matrix
from beamforge.depths import solve_depths_general, solve_depths_symmetric
from cli.commands import REPRODUCTION_ROWS, TIME_TOLERANCE, reproduction_grid
from gatecat import (
    GateContext,
    GateKind,
    GateRequest,
    correction_comparison,
    optimize_lambda,
    simulate_gate,
)
from relmode.spectrum import optimal_anharmonicity

pytestmark = pytest.mark.slow

ROTATION_THRESHOLDS = {"R": 1e-3, "SR": 1e-2, "CR": 1e-1}


@pytest.fixture(scope="module")
def optimized_reports(settings):
    """Each headline gate at the best λ of its reproduction grid."""
    context = GateContext(settings=settings)
    reports = {}
    for row in REPRODUCTION_ROWS:
        request = GateRequest(kind=row.kind, magnitude=row.magnitude)
        grid = reproduction_grid(row, settings, context.u_prime_for(request))
        best, _ = optimize_lambda(request, settings, lambda_grid=grid)
        reports[row.kind] = (row, request.with_lambda(best), simulate_gate(request.with_lambda(best), context).report)
    return reports


def test_published_base_depths(geometry, five_beam):
    three = solve_depths_symmetric(2.0, 0.0, 0.6775, geometry)
    assert np.allclose(three.base_depths, [1.76, 2.17, 1.76], rtol=0.03)
    five = solve_depths_general([0.0, 2.0, 0.0, 0.0, 0.0], five_beam, geometry)
    assert np.allclose(five.base_depths, [1.81, 2.94, 2.82, 1.42, 2.88], rtol=0.03)
    amplitudes = build_coeff_matrix(five_beam, geometry).amplitudes(five_beam.base_depths)
    assert np.allclose(amplitudes, [0.0, 2.0, 0.0, 0.0, 0.0], atol=0.04)


def test_published_anharmonicity_maximum():
    u_best, anharmonicity = optimal_anharmonicity((0.0, 1.2))
    assert u_best == pytest.approx(0.61, abs=0.02)
    assert anharmonicity == pytest.approx(0.084, abs=0.002)


@pytest.mark.parametrize("kind", [GateKind.D, GateKind.S, GateKind.CS, GateKind.CD])
def test_headline_infidelities(optimized_reports, kind):
    """
    Headline gates at their optimal λ.

    Expected:
    - D ≤ 1e-5, S ≤ 1e-4, CS ≤ 1e-3 and CD inside [0.06, 0.5].
    - Gate times within 20% of 7.1, 190, 13000 and 5100 μs.
    - Norm drift below 1e-10.
    """
    row, _, report = optimized_reports[kind]
    assert row.lower <= report.infidelity <= row.upper
    assert report.duration * 1e6 == pytest.approx(row.published_time_us, rel=TIME_TOLERANCE)
    assert report.diagnostics.norm_drift < 1e-10


@pytest.mark.parametrize("kind", [GateKind.D, GateKind.S])
def test_results_are_converged(settings, optimized_reports, kind):
    """
    Halve the step and grow the COM basis by half.

    Expected:
    - The infidelity moves by less than 1e-7.
    """
    _, request, report = optimized_reports[kind]
    refined_settings = settings.model_copy(update={"STEPS_PER_PERIOD": 2 * settings.STEPS_PER_PERIOD})
    base_n_com = settings.N_COM_SQUEEZING if kind == GateKind.S else settings.N_COM
    context = GateContext(settings=refined_settings, n_com=int(1.5 * base_n_com))
    refined = simulate_gate(request, context).report
    assert abs(refined.infidelity - report.infidelity) < 1e-7


@pytest.mark.parametrize("kind", ["R", "SR", "CR"])
def test_rotation_thresholds(settings, kind):
    request = GateRequest(kind=kind, magnitude=0.5 * math.pi, initial_alpha=1.0)
    best, curve = optimize_lambda(request, settings, lambda_grid=np.geomspace(0.02, 0.4, 8))
    fidelities = [fidelity for _, fidelity in curve if fidelity is not None]
    assert 1.0 - max(fidelities) <= ROTATION_THRESHOLDS[kind]
    assert 0.02 <= best <= 0.4


def test_spin_rotation_corrections_pay_off_at_large_amplitude(settings):
    rows = correction_comparison("SR", [6.0], lam=0.1, magnitude=0.5 * math.pi, settings=settings)
    assert rows[0]["infidelity_corrected"] * 10.0 <= rows[0]["infidelity_uncorrected"]
