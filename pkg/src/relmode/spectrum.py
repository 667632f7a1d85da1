import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, optimize, special

from exceptions import BasisInadequacyError, ConfigurationError
from relmode.interaction import central_density_weight, interaction_matrix_element

logger = logging.getLogger(__name__)

MIN_LEVELS = 8
MATRIX_LIMIT = 512
CONVERGENCE_TOLERANCE = 1e-10
ROOT_TOLERANCE = 1e-15


@dataclass(frozen=True, eq=False)
class RelativeSpectrum:
    """
    Even-parity levels of b†b + ½ + √π u′ δ(r̂ₓ), energies in ħωx.

    `eigenvectors[:, n]` expands the dressed level |2ñ⟩ over harmonic states |0⟩, |2⟩, |4⟩, …
    """

    u_prime: float
    energies: np.ndarray
    eigenvectors: np.ndarray
    method: str = "exact"

    def __post_init__(self):
        self.energies.setflags(write=False)
        self.eigenvectors.setflags(write=False)

    @property
    def dimension(self) -> int:
        return int(self.energies.size)

    @property
    def omega_tilde(self) -> float:
        """Qubit splitting (Ẽ₂ − Ẽ₀) in units of ωx."""
        return float(self.energies[1] - self.energies[0])

    @property
    def omega_tilde_prime(self) -> float:
        return float(self.energies[2] - self.energies[1])

    @property
    def anharmonicity(self) -> float:
        return float(self.energies[2] - 2.0 * self.energies[1] + self.energies[0])

    def truncated(self, n_levels: int) -> "RelativeSpectrum":
        if n_levels > self.dimension:
            raise BasisInadequacyError(
                f"Requested {n_levels} dressed levels but the spectrum holds {self.dimension}."
            )
        return RelativeSpectrum(
            u_prime=self.u_prime,
            energies=np.array(self.energies[:n_levels]),
            eigenvectors=np.array(self.eigenvectors[:, :n_levels]),
            method=self.method,
        )


def _quantization_condition(energy: float, g: float) -> float:
    """
    Even-parity condition g·Γ(1/4 − E/2) + 2·Γ(3/4 − E/2) = 0, rescaled to stay finite.

    Written with the reflection formula and divided by Γ(1/4 + E/2), which keeps the sign.
    """
    ratio = math.exp(special.gammaln(0.75 + energy / 2.0) - special.gammaln(0.25 + energy / 2.0))
    return g * math.sin(math.pi * (0.75 - energy / 2.0)) + 2.0 * math.sin(math.pi * (0.25 - energy / 2.0)) * ratio


def exact_energies(u_prime: float, n_levels: int) -> np.ndarray:
    """One root of the quantization condition in each interval [2n + ½, 2n + 3/2]."""
    if u_prime < 0:
        raise ConfigurationError("Interaction strength u′ must be non-negative.")
    harmonic = 2.0 * np.arange(n_levels) + 0.5
    if u_prime == 0.0:
        return harmonic
    g = math.sqrt(math.pi) * u_prime
    energies = np.empty(n_levels)
    for n, lower in enumerate(harmonic):
        energies[n] = optimize.brentq(
            _quantization_condition, lower, lower + 1.0, args=(g,), xtol=ROOT_TOLERANCE, rtol=4 * np.finfo(float).eps
        )
    return energies


def _closed_form_vectors(energies: np.ndarray, n_expansion: int) -> np.ndarray:
    indices = np.arange(n_expansion)
    amplitudes = (-1.0) ** indices * np.sqrt([central_density_weight(m) for m in indices])
    vectors = amplitudes[:, None] / (energies[None, :] - (2.0 * indices[:, None] + 0.5))
    vectors *= np.sign(vectors[np.arange(energies.size), np.arange(energies.size)])[None, :]
    overlap = vectors.T @ vectors
    values, basis = linalg.eigh(overlap)
    return vectors @ (basis @ np.diag(values ** -0.5) @ basis.T)


def _matrix_spectrum(u_prime: float, n_rel: int) -> tuple[np.ndarray, np.ndarray]:
    indices = np.arange(n_rel)
    weights = np.sqrt([central_density_weight(m) for m in indices]) * (-1.0) ** indices
    hamiltonian = np.diag(2.0 * indices + 0.5) + u_prime * np.outer(weights, weights)
    energies, vectors = linalg.eigh(hamiltonian)
    signs = np.sign(np.diag(vectors))
    signs[signs == 0] = 1.0
    return energies, vectors * signs[None, :]


def interaction_matrix(u_prime: float, n_rel: int) -> np.ndarray:
    """Harmonic-basis contact matrix V_mn / ħωx over the even states."""
    return np.array([[interaction_matrix_element(m, n, u_prime) for n in range(n_rel)] for m in range(n_rel)])


def diagonalize_relative(u_prime: float, n_rel: int = 64, method: str = "exact", n_expansion: int = 2048,
                         check_convergence: bool = True) -> RelativeSpectrum:
    """
    Dressed even levels of the relative mode.

    :param u_prime: Interaction strength u / ħωx.
    :param n_rel: Number of dressed levels returned.
    :param method: "exact" solves the quantization condition and expands the closed-form
        eigenfunctions over `n_expansion` harmonic states; "matrix" diagonalizes the truncated
        harmonic-basis Hamiltonian.
    :param check_convergence: For "matrix", require Ẽ₀ to settle when the basis doubles.
    :raises BasisInadequacyError: When the truncated matrix has not converged by 512 states.
    """
    if n_rel < MIN_LEVELS:
        raise ConfigurationError(f"At least {MIN_LEVELS} relative levels are required, got {n_rel}.")
    if u_prime < 0:
        raise ConfigurationError("Interaction strength u′ must be non-negative.")

    if method == "matrix":
        energies, vectors = _matrix_spectrum(u_prime, n_rel)
        if check_convergence:
            size, ground = n_rel, energies[0]
            while True:
                doubled = 2 * size
                if doubled > MATRIX_LIMIT:
                    raise BasisInadequacyError(
                        f"Truncated contact Hamiltonian at u′={u_prime} has not converged by {MATRIX_LIMIT} states."
                    )
                next_ground = _matrix_spectrum(u_prime, doubled)[0][0]
                if abs(next_ground - ground) < CONVERGENCE_TOLERANCE:
                    break
                size, ground = doubled, next_ground
        spectrum = RelativeSpectrum(u_prime=u_prime, energies=energies, eigenvectors=vectors, method="matrix")
    elif method == "exact":
        if n_expansion < 4 * n_rel:
            raise ConfigurationError("The harmonic expansion must hold at least four times the dressed levels.")
        energies = exact_energies(u_prime, n_rel)
        if u_prime == 0.0:
            vectors = np.eye(n_expansion, n_rel)
        else:
            vectors = _closed_form_vectors(energies, n_expansion)
        spectrum = RelativeSpectrum(u_prime=u_prime, energies=energies, eigenvectors=vectors, method="exact")
    else:
        raise ConfigurationError(f"Unknown diagonalization method '{method}'.")

    logger.info("Relative spectrum u′=%.4f (%s): Ẽ0=%.10f ω̃=%.10f A=%.6f", u_prime, method,
                spectrum.energies[0], spectrum.omega_tilde, spectrum.anharmonicity)
    return spectrum


def anharmonicity_scan(u_grid) -> np.ndarray:
    return np.array([float(np.diff(exact_energies(float(u), 3), 2)[0]) for u in u_grid])


def optimal_anharmonicity(bounds: tuple[float, float] = (0.0, 1.5)) -> tuple[float, float]:
    """u′ maximizing Ẽ₄ − 2Ẽ₂ + Ẽ₀ and the maximum itself."""
    result = optimize.minimize_scalar(
        lambda u: -float(np.diff(exact_energies(u, 3), 2)[0]),
        bounds=bounds,
        method="bounded",
        options={"xatol": 1e-8},
    )
    return float(result.x), float(-result.fun)
