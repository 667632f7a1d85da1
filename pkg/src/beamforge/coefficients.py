import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from beamforge.geometry import BeamGeometry, TrapLayout
from exceptions import SeriesConvergenceError, SingularLayoutError

logger = logging.getLogger(__name__)

S_MAX = 40
T_MAX = 12
TAIL_RATIO = 1e-13
ZETA_LIMIT = 2.5
CONDITION_LIMIT = 1e8
HERMITE_NODES = 120


@lru_cache(maxsize=None)
def g_integral(n: int, a: float) -> float:
    """
    π^{-1/2} ∫ (1 + a²x²)^{-n} e^{-x²} dx over the real line.

    The integrand is even, so only the half line is integrated adaptively.
    """
    if n < 0 or a < 0:
        raise ValueError("g_integral needs n >= 0 and a >= 0.")
    if n == 0 or a == 0.0:
        return 1.0
    half, _ = integrate.quad(
        lambda x: (1.0 + a * a * x * x) ** (-n) * math.exp(-x * x),
        0.0,
        np.inf,
        epsabs=1e-15,
        epsrel=1e-14,
        limit=400,
    )
    return 2.0 * half / math.sqrt(math.pi)


@lru_cache(maxsize=None)
def _transverse_weight(s: int, eps_y: float, eps_z: float, t_max: int) -> float:
    total = 0.0
    for t in range(t_max + 1):
        total += (2.0 * eps_y ** 2) ** t * special.binom(-0.5, t) * g_integral(s + t + 1, eps_z)
    return total


@lru_cache(maxsize=None)
def _axial_coefficient(m: int, zeta: float, eps_y: float, eps_z: float, s_max: int, t_max: int) -> float:
    if abs(zeta) > ZETA_LIMIT:
        raise SeriesConvergenceError(
            f"Series for c_{m} does not converge at ζ={zeta} with s_max={s_max} (|ζ| > {ZETA_LIMIT})."
        )
    terms = []
    for s in range((m + 1) // 2, s_max + 1):
        power = 2 * s - m
        terms.append(
            _transverse_weight(s, eps_y, eps_z, t_max)
            * math.comb(2 * s, m)
            * (-2.0) ** s / math.factorial(s)
            * zeta ** power
        )
    largest = max(abs(term) for term in terms)
    if largest > 0 and abs(terms[-1]) > TAIL_RATIO * largest:
        raise SeriesConvergenceError(
            f"Series for c_{m} at ζ={zeta} keeps a tail of {abs(terms[-1]):.3e} after {s_max} terms."
        )
    return (-1.0) ** (m + 1) * math.fsum(terms)


def axial_coefficient(m: int, zeta: float, geometry: BeamGeometry, s_max: int = S_MAX, t_max: int = T_MAX) -> float:
    """
    Order-m coefficient of one Gaussian beam averaged over the transverse ground states.

    ⟨0_y 0_z| f |0_y 0_z⟩ = U Σ_m c_m (x')^m with x' = x / W.

    :param m: Expansion order, m >= 0.
    :param zeta: Beam centre in units of the waist.
    :param geometry: Supplies εy and εz.
    :raises SeriesConvergenceError: When the truncated double sum has not converged.
    """
    if m < 0:
        raise ValueError("Expansion order must be non-negative.")
    return _axial_coefficient(int(m), float(zeta), float(geometry.eps_y), float(geometry.eps_z), s_max, t_max)


@dataclass(frozen=True)
class CoefficientMatrix:
    """Rows are expansion orders, columns are beams: V = C U."""

    entries: np.ndarray
    orders: tuple[int, ...]
    positions: tuple[float, ...]
    layout_name: str
    geometry: BeamGeometry

    def __post_init__(self):
        self.entries.setflags(write=False)

    @property
    def condition_number(self) -> float:
        if self.entries.size == 0 or not np.any(self.entries):
            return math.inf
        return float(np.linalg.cond(self.entries))

    def amplitudes(self, depths) -> np.ndarray:
        return self.entries @ np.asarray(depths, dtype=float)

    def solve(self, targets) -> np.ndarray:
        """Depths realizing `targets` on every order of the matrix; square matrices only."""
        rows, cols = self.entries.shape
        if rows != cols:
            raise SingularLayoutError(
                f"Layout '{self.layout_name}' controls {rows} orders with {cols} beams; the system is not square."
            )
        condition = self.condition_number
        if not condition < CONDITION_LIMIT:
            raise SingularLayoutError(
                f"Coefficient matrix of layout '{self.layout_name}' is ill-conditioned (cond={condition:.3e})."
            )
        return np.linalg.solve(self.entries, np.asarray(targets, dtype=float))


def build_coeff_matrix(layout: TrapLayout, geometry: BeamGeometry, orders=None) -> CoefficientMatrix:
    orders = tuple(orders) if orders is not None else tuple(range(1, layout.k_max + 1))
    entries = np.array(
        [[axial_coefficient(k, zeta, geometry) for zeta in layout.positions] for k in orders],
        dtype=float,
    )
    matrix = CoefficientMatrix(
        entries=entries,
        orders=orders,
        positions=layout.positions,
        layout_name=layout.name,
        geometry=geometry,
    )
    logger.info("Coefficient matrix for '%s': shape %s, cond %.3e", layout.name, entries.shape,
                matrix.condition_number)
    return matrix


def transverse_averaged_beam(x, zeta: float, geometry: BeamGeometry, n_nodes: int = HERMITE_NODES):
    """
    Single unit-depth beam averaged over the y/z ground states by direct quadrature.

    The y average is Gaussian and done in closed form; z is integrated with Gauss-Hermite
    nodes. `x` may be complex, which the contour extraction of coefficients relies on.
    """
    nodes, weights = np.polynomial.hermite.hermgauss(n_nodes)
    x = np.asarray(x)
    denominator = 1.0 + geometry.eps_z ** 2 * nodes ** 2
    transverse = weights / denominator / np.sqrt(1.0 + 2.0 * geometry.eps_y ** 2 / denominator)
    exponent = -2.0 * (x[..., None] - zeta) ** 2 / denominator
    return -np.sum(transverse * np.exp(exponent), axis=-1) / math.sqrt(math.pi)


def taylor_coefficients_by_contour(zeta: float, geometry: BeamGeometry, max_order: int,
                                   radius: float = 0.5, n_points: int = 64) -> np.ndarray:
    """Coefficients c_0..c_max_order from a Cauchy integral of the quadrature-evaluated beam."""
    angles = 2.0 * math.pi * np.arange(n_points) / n_points
    samples = transverse_averaged_beam(radius * np.exp(1j * angles), zeta, geometry)
    spectrum = np.fft.fft(samples) / n_points
    orders = np.arange(max_order + 1)
    return np.real(spectrum[orders] / radius ** orders)


def sixth_order_residual(zeta: float, geometry: BeamGeometry) -> float:
    """|V6| of the symmetric three-beam base layout at ±ζ, in units of V0."""
    from beamforge.depths import symmetric_depths

    depths = symmetric_depths(2.0, 0.0, zeta, geometry)
    c6 = np.array([axial_coefficient(6, -zeta, geometry), axial_coefficient(6, 0.0, geometry),
                   axial_coefficient(6, zeta, geometry)])
    return float(abs(c6 @ depths))
