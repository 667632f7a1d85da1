import logging
import math
from dataclasses import dataclass, field

import numpy as np

from beamforge.coefficients import build_coeff_matrix
from beamforge.depths import DepthSchedule, Waveform
from beamforge.geometry import BeamGeometry
from dynamics.basis import ProductBasis, com_position_power
from exceptions import BasisInadequacyError, ConfigurationError
from relmode.elements import dressed_power_elements
from relmode.spectrum import RelativeSpectrum

logger = logging.getLogger(__name__)

HERMITICITY_TOLERANCE = 1e-13
NEGLIGIBLE = 1e-15


def expand_symmetric_power(k: int) -> list[tuple[float, int, int]]:
    """
    Σᵢ (xᵢ/x₀)^k written in COM and relative coordinates.

    :return: Triples (weight, COM power, relative power) of 2^{1−k/2} C(k, j) R̂^{k−j} r̂^j, even j only.
    """
    if k < 1:
        raise ValueError("Order must be at least 1.")
    prefactor = 2.0 ** (1.0 - k / 2.0)
    return [(prefactor * math.comb(k, j), k - j, j) for j in range(0, k + 1, 2)]


@dataclass(frozen=True)
class OperatorTerm:
    """Hermitian matrix on the product basis multiplied by a waveform value (1 for static terms)."""

    matrix: np.ndarray
    tag: str
    waveform: Waveform | None = None

    def __post_init__(self):
        asymmetry = np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0)
        if asymmetry > HERMITICITY_TOLERANCE * max(1.0, np.max(np.abs(self.matrix), initial=0.0)):
            raise ConfigurationError(f"Operator term '{self.tag}' is not Hermitian (deviation {asymmetry:.3e}).")

    def coefficient(self, t: float) -> float:
        if self.waveform is None:
            return 1.0
        return float(self.waveform(t))


@dataclass(frozen=True)
class DriveAssembly:
    """
    H(τ) = diag(n + Ẽ_ĩ) + Σ static terms + Σ w(τ) · drive terms, in units of ħωx.
    """

    basis: ProductBasis
    h0_diagonal: np.ndarray
    static_terms: tuple[OperatorTerm, ...] = ()
    drive_terms: tuple[OperatorTerm, ...] = ()
    lam: float = 0.0
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def fastest_frequency(self) -> float:
        return max((term.waveform.fastest_frequency for term in self.drive_terms if term.waveform), default=0.0)

    def static_hamiltonian(self) -> np.ndarray:
        hamiltonian = np.diag(self.h0_diagonal).astype(float)
        for term in self.static_terms:
            hamiltonian = hamiltonian + term.matrix
        return hamiltonian

    def hamiltonian(self, t: float) -> np.ndarray:
        hamiltonian = self.static_hamiltonian()
        for term in self.drive_terms:
            hamiltonian = hamiltonian + term.coefficient(t) * term.matrix
        return hamiltonian

    def drive_groups(self) -> list[tuple[Waveform, np.ndarray]]:
        """
        Drive terms summed per distinct tone set; each entry holds a unit-amplitude waveform and its matrix.

        DC waveforms come back as a group without tones.
        """
        groups: dict[tuple, np.ndarray] = {}
        for term in self.drive_terms:
            key = term.waveform.tones
            contribution = term.waveform.amplitude * term.matrix
            groups[key] = groups[key] + contribution if key in groups else contribution
        return [(Waveform(order=1, amplitude=1.0, tones=key), matrix) for key, matrix in groups.items()]


class OperatorCache:
    """Symmetric-power operators Σᵢ(xᵢ/x₀)^k on one product basis."""

    def __init__(self, basis: ProductBasis, spectrum: RelativeSpectrum):
        if spectrum.dimension < basis.n_rel:
            raise BasisInadequacyError(
                f"Spectrum holds {spectrum.dimension} levels, the product basis needs {basis.n_rel}."
            )
        self.basis = basis
        self.spectrum = spectrum
        self._powers: dict[int, np.ndarray] = {}

    def relative_power(self, power: int) -> np.ndarray:
        return dressed_power_elements(self.spectrum, power)[: self.basis.n_rel, : self.basis.n_rel]

    def symmetric_power(self, k: int) -> np.ndarray:
        if k not in self._powers:
            if self.basis.n_com < k:
                raise BasisInadequacyError(
                    f"COM basis of {self.basis.n_com} states cannot represent order-{k} operators."
                )
            total = np.zeros((self.basis.dimension, self.basis.dimension))
            for weight, com_power, rel_power in expand_symmetric_power(k):
                total += weight * np.kron(com_position_power(self.basis.n_com, com_power),
                                          self.relative_power(rel_power))
            self._powers[k] = 0.5 * (total + total.T)
        return self._powers[k]


def order_operator(cache: OperatorCache, amplitudes, eps_x: float, orders) -> np.ndarray:
    """Σ_k (V_k / 4) εx^{k−2} Σᵢ(xᵢ/x₀)^k in units of ħωx for V_k given in units of V0."""
    total = np.zeros((cache.basis.dimension, cache.basis.dimension))
    for k, amplitude in zip(orders, amplitudes):
        if abs(amplitude) < NEGLIGIBLE:
            continue
        total += 0.25 * amplitude * eps_x ** (k - 2) * cache.symmetric_power(k)
    return total


def assemble(schedule: DepthSchedule, spectrum: RelativeSpectrum, geometry: BeamGeometry, basis: ProductBasis,
             k_sim: int = 14) -> DriveAssembly:
    """
    Lab-frame Hamiltonian of a depth schedule on the product basis.

    Controlled orders of the base potential are represented by H₀ itself; base orders beyond
    k_max become static terms. Each waveform contributes one drive term containing its own order
    and every uncontrolled order the modulation moves as well.

    :param schedule: Base depths, waveforms and their depth responses.
    :param spectrum: Dressed relative levels; its lowest `basis.n_rel` levels are kept.
    :param k_sim: Highest potential order carried into the dynamics.
    :raises BasisInadequacyError: When the COM basis cannot hold order-k_sim operators.
    """
    layout = schedule.layout
    if k_sim < layout.k_max:
        raise ConfigurationError(f"K_sim={k_sim} is below the controlled order k_max={layout.k_max}.")
    if basis.n_com < k_sim:
        raise BasisInadequacyError(f"COM basis of {basis.n_com} states cannot represent order-{k_sim} operators.")
    cache = OperatorCache(basis, spectrum)
    orders = tuple(range(1, k_sim + 1))
    coefficients = build_coeff_matrix(layout, geometry, orders=orders).entries
    uncontrolled = [i for i, k in enumerate(orders) if k > layout.k_max]

    phonons = np.repeat(np.arange(basis.n_com, dtype=float), basis.n_rel)
    h0_diagonal = phonons + np.tile(spectrum.energies[: basis.n_rel], basis.n_com)

    static_terms = []
    base_amplitudes = coefficients @ schedule.base_depths
    residual_orders = [orders[i] for i in uncontrolled if abs(base_amplitudes[i]) >= NEGLIGIBLE]
    if residual_orders:
        matrix = order_operator(cache, base_amplitudes[uncontrolled], geometry.eps_x,
                                [orders[i] for i in uncontrolled])
        static_terms.append(OperatorTerm(matrix=matrix, tag=f"static residual orders {residual_orders}"))

    drive_terms = []
    for waveform, response in zip(schedule.waveforms, schedule.responses):
        moved = coefficients @ response
        amplitudes = np.zeros(len(orders))
        amplitudes[waveform.order - 1] = 1.0
        amplitudes[uncontrolled] = moved[uncontrolled]
        matrix = schedule.lam * order_operator(cache, amplitudes, geometry.eps_x, orders)
        drive_terms.append(OperatorTerm(matrix=matrix, tag=f"order-{waveform.order} drive", waveform=waveform))

    logger.info(
        "Assembled %d-dimensional Hamiltonian: residual orders %s, %d drive terms, λ=%.4g",
        basis.dimension, residual_orders, len(drive_terms), schedule.lam,
    )
    return DriveAssembly(
        basis=basis,
        h0_diagonal=h0_diagonal,
        static_terms=tuple(static_terms),
        drive_terms=tuple(drive_terms),
        lam=schedule.lam,
        metadata={"layout": layout.name, "k_sim": k_sim, "residual_orders": residual_orders},
    )
