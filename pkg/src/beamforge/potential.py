import logging
import math
from dataclasses import dataclass, field

import numpy as np

from beamforge.coefficients import axial_coefficient, transverse_averaged_beam
from beamforge.geometry import BeamGeometry
from exceptions import ConfigurationError

logger = logging.getLogger(__name__)

VALIDITY_WINDOW = 1.5
TAIL_WARNING = 1e-9


@dataclass(frozen=True)
class PotentialValue:
    """Effective 1D potential in units of V0 with its truncation diagnostics."""

    value: np.ndarray
    tail_estimate: float = 0.0
    warnings: tuple[str, ...] = field(default=())


def _series_at(x: float, depths, coefficients) -> float:
    contributions = []
    for depth, row in zip(depths, coefficients):
        contributions.append(depth * math.fsum(c * x ** m for m, c in enumerate(row)))
    return math.fsum(contributions)


def effective_potential(x, depths, positions, geometry: BeamGeometry, k_sim: int = 14,
                        mode: str = "series") -> PotentialValue:
    """
    Σ_j U_j ⟨0_y 0_z| f(x′ − ζ_j) |0_y 0_z⟩ along the axis, in units of V0.

    :param x: Axial coordinate x′ = x / W, scalar or array, inside |x′| ≤ 1.5.
    :param depths: Beam depths U_j in units of V0.
    :param positions: Beam centres ζ_j.
    :param k_sim: Highest order kept by the series.
    :param mode: "series" for the truncated expansion, "quadrature" for direct transverse averaging.
    :return: The potential together with the estimated series tail.
    """
    x_values = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(x_values) > VALIDITY_WINDOW):
        raise ConfigurationError(f"Effective potential is evaluated only inside |x′| ≤ {VALIDITY_WINDOW}.")
    depths = [float(u) for u in depths]
    positions = [float(z) for z in positions]
    if len(depths) != len(positions):
        raise ConfigurationError("One depth per beam position is required.")

    if mode == "quadrature":
        value = sum(u * transverse_averaged_beam(x_values, zeta, geometry) for u, zeta in zip(depths, positions))
        return PotentialValue(value=np.real(np.asarray(value, dtype=complex)).reshape(np.shape(x)))
    if mode != "series":
        raise ConfigurationError(f"Unknown potential mode '{mode}'.")

    coefficients = [[axial_coefficient(m, zeta, geometry) for m in range(k_sim + 1)] for zeta in positions]
    tail_rows = [[axial_coefficient(m, zeta, geometry) for m in (k_sim + 1, k_sim + 2)] for zeta in positions]
    value = np.array([_series_at(float(point), depths, coefficients) for point in x_values])
    reach = float(np.max(np.abs(x_values)))
    tail = sum(
        abs(sum(u * row[i] for u, row in zip(depths, tail_rows))) * reach ** (k_sim + 1 + i)
        for i in range(2)
    )
    warnings = ()
    if tail > TAIL_WARNING:
        message = f"Series tail {tail:.3e} V0 beyond order {k_sim} at |x′|={reach:.3g}."
        logger.warning(message)
        warnings = (message,)
    return PotentialValue(value=value.reshape(np.shape(x)), tail_estimate=float(tail), warnings=warnings)
