import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import sparse

from relmode.spectrum import RelativeSpectrum


def position_operator(dimension: int) -> sparse.csr_matrix:
    """(b + b†) / √2 on the first `dimension` harmonic states of either parity."""
    off_diagonal = np.sqrt(np.arange(1, dimension) / 2.0)
    return sparse.diags([off_diagonal, off_diagonal], [-1, 1], format="csr")


def harmonic_power_matrix(n_even: int, power: int) -> sparse.csr_matrix:
    """
    r̂ₓ^power between the even harmonic states |0⟩ … |2(n_even−1)⟩.

    The ladder algebra is carried out in a basis padded by `power` states, so every kept entry is exact.
    """
    dimension = 2 * n_even + power
    position = position_operator(dimension)
    result = sparse.identity(dimension, format="csr")
    for _ in range(power):
        result = result @ position
    even = np.arange(0, 2 * n_even, 2)
    return result[even][:, even].tocsr()


def dressed_power_elements(spectrum: RelativeSpectrum, power: int) -> np.ndarray:
    """⟨ĩ|r̂ₓ^power|j̃⟩ over the dressed levels of `spectrum`; odd powers vanish identically."""
    if power < 0:
        raise ValueError("Operator power must be non-negative.")
    return _power_elements(spectrum, power)


# Keyed on spectrum identity.
@lru_cache(maxsize=128)
def _power_elements(spectrum: RelativeSpectrum, power: int) -> np.ndarray:
    if power % 2 == 1:
        elements = np.zeros((spectrum.dimension, spectrum.dimension))
    else:
        vectors = spectrum.eigenvectors
        elements = vectors.T @ (harmonic_power_matrix(vectors.shape[0], power) @ vectors)
        elements = 0.5 * (elements + elements.T)
    elements.setflags(write=False)
    return elements


@dataclass(frozen=True)
class QubitCoefficients:
    """Couplings of r̂ₓ² and r̂ₓ⁴ inside the qubit |↑⟩ = |0̃⟩, |↓⟩ = |2̃⟩ and to the leakage level |4̃⟩."""

    c1: float
    c2: float
    c2p: float
    c3: float
    r2: np.ndarray
    r4: np.ndarray

    def to_dict(self) -> dict[str, float]:
        return {"c1": self.c1, "c2": self.c2, "c2p": self.c2p, "c3": self.c3}


def qubit_coefficients(spectrum: RelativeSpectrum) -> QubitCoefficients:
    r2 = dressed_power_elements(spectrum, 2)
    r4 = dressed_power_elements(spectrum, 4)
    return QubitCoefficients(
        c1=float(0.5 * (r2[0, 0] - r2[1, 1])),
        c2=float(r2[0, 1]),
        c2p=float(r2[1, 2]),
        c3=float(r4[0, 1]),
        r2=r2,
        r4=r4,
    )


def spectrum_export(spectrum: RelativeSpectrum) -> dict:
    """JSON-ready summary of a spectrum and its qubit coefficients."""
    coefficients = qubit_coefficients(spectrum)
    return {
        "u_prime": spectrum.u_prime,
        "energies": [float(e) for e in spectrum.energies],
        "anharmonicity": spectrum.anharmonicity,
        "omega_tilde_over_omega_x": spectrum.omega_tilde,
        "omega_tilde_prime_over_omega_x": spectrum.omega_tilde_prime,
        "method": spectrum.method,
        "coefficients": coefficients.to_dict(),
    }


def completeness_residual(spectrum: RelativeSpectrum, level: int = 0) -> float:
    """|Σ_j ⟨ĩ|r̂²|j̃⟩⟨j̃|r̂²|ĩ⟩ − ⟨ĩ|r̂⁴|ĩ⟩| over the retained levels."""
    r2 = dressed_power_elements(spectrum, 2)
    r4 = dressed_power_elements(spectrum, 4)
    return float(abs(math.fsum(r2[level, :] * r2[:, level]) - r4[level, level]))
