import logging
import math
from dataclasses import dataclass, field

import numpy as np

from exceptions import ConfigurationError
from tomoscope.protocol import CharGrid
from tomoscope.states import ModePairState, cached_displacement

logger = logging.getLogger(__name__)

ALIASING_LIMIT = 1e-4
IMAGINARY_LIMIT = 1e-8
MAX_SPACING = 0.25


@dataclass
class WignerGrid:
    """W(γ) on γ = x + ip, `values[k, j]` at (axis[k], axis[j])."""

    axis: np.ndarray
    values: np.ndarray
    imaginary_residual: float = 0.0
    warnings: list[str] = field(default_factory=list)

    @property
    def spacing(self) -> float:
        return float(self.axis[1] - self.axis[0])

    @property
    def normalization(self) -> float:
        return float(np.sum(self.values) * self.spacing ** 2)

    @property
    def minimum(self) -> float:
        return float(np.min(self.values))

    def peak(self) -> tuple[complex, float]:
        k, j = np.unravel_index(np.argmax(self.values), self.values.shape)
        return complex(self.axis[k], self.axis[j]), float(self.values[k, j])

    def rows(self):
        for k, x in enumerate(self.axis):
            for j, p in enumerate(self.axis):
                yield float(x), float(p), float(self.values[k, j]), 0.0


def edge_weight(chi: np.ndarray) -> float:
    """Largest |χ| on the grid boundary; what the truncated transform misses."""
    edges = np.concatenate([chi[0, :], chi[-1, :], chi[:, 0], chi[:, -1]])
    return float(np.max(np.abs(edges)))


def wigner_from_char(grid: CharGrid, axis=None, max_alpha: float = 0.0) -> WignerGrid:
    """
    W(γ) = (1/π²)∫χ(β)e^{γβ* − γ*β}d²β as a direct sum over the χ_R grid.

    The kernel separates into e^{2ip Re β} e^{−2ix Im β}, so the sum is two matrix products.

    :param axis: Output coordinates for x and p; the χ axis by default.
    :param max_alpha: Largest expected displacement, for the grid extent check.
    """
    beta_axis = grid.axis
    if beta_axis.size < 2:
        raise ConfigurationError("The χ grid needs at least two points per axis.")
    spacing = grid.spacing
    extent = float(beta_axis[-1])
    warnings = list(grid.warnings)
    if spacing > MAX_SPACING + 1e-12:
        raise ConfigurationError(f"χ grid spacing {spacing:.3g} exceeds {MAX_SPACING}.")
    if extent < 4.0 + 2.0 * max_alpha:
        warnings.append(f"χ grid extent {extent:.3g} is below 4 + 2|α| = {4.0 + 2.0 * max_alpha:.3g}.")

    axis = beta_axis if axis is None else np.asarray(axis, dtype=float)
    kernel_x = np.exp(-2j * np.outer(axis, beta_axis))
    kernel_p = np.exp(2j * np.outer(axis, beta_axis))
    transform = kernel_x @ grid.chi_com.T @ kernel_p.T * spacing ** 2 / math.pi ** 2
    residual = float(np.max(np.abs(transform.imag)))
    if residual > IMAGINARY_LIMIT:
        warnings.append(f"Wigner function has an imaginary part of {residual:.3e}.")

    aliasing = edge_weight(grid.chi_com)
    if aliasing > ALIASING_LIMIT:
        warnings.append(f"|χ| reaches {aliasing:.3e} on the grid edge; the Wigner function is aliased.")
    for message in warnings[len(grid.warnings):]:
        logger.warning(message)
    return WignerGrid(axis=axis, values=transform.real, imaginary_residual=residual, warnings=warnings)


def com_density(state: ModePairState) -> np.ndarray:
    amplitudes = state.amplitudes / state.norm
    return amplitudes @ amplitudes.conj().T


def wigner_direct(density: np.ndarray, axis) -> np.ndarray:
    """
    W(γ) = (2/π) Tr[ρ D(γ) Π D(γ)†] with the parity Π, computed from a COM density matrix.

    Used as an independent check of the transform.
    """
    density = np.asarray(density, dtype=complex)
    dimension = density.shape[0]
    parity = np.diag((-1.0) ** np.arange(dimension))
    axis = np.asarray(axis, dtype=float)
    values = np.empty((axis.size, axis.size))
    for k, x in enumerate(axis):
        for j, p in enumerate(axis):
            displacement = cached_displacement(complex(x, p), dimension)
            values[k, j] = (2.0 / math.pi) * np.trace(density @ displacement @ parity @ displacement.conj().T).real
    return values
