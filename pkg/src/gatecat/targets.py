import cmath
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from dynamics.basis import ProductBasis, annihilation
from exceptions import BasisInadequacyError
from gatecat.requests import GateKind, gate_kind

FOCK_PADDING = 32
SQUEEZING_LIMIT = 1.5
IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


def sigma_phi(phi: float) -> np.ndarray:
    """cos φ σ̂x + sin φ σ̂y = σ̂₋e^{−iφ} + σ̂₊e^{iφ} with σ̂₋ = |↑⟩⟨↓|."""
    return np.array([[0.0, cmath.exp(-1j * phi)], [cmath.exp(1j * phi), 0.0]])


def _projectors(phi: float) -> tuple[np.ndarray, np.ndarray]:
    sigma = sigma_phi(phi)
    return 0.5 * (IDENTITY_2 + sigma), 0.5 * (IDENTITY_2 - sigma)


@dataclass(frozen=True)
class TargetUnitary:
    """Ideal gate on {↑, ↓} ⊗ Fock embedded in the product basis; leakage levels map to zero."""

    matrix: np.ndarray
    tag: str

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.matrix @ amplitudes


def _com_exponential(generator_builder, n_com: int) -> np.ndarray:
    padded = n_com + FOCK_PADDING
    lowering = annihilation(padded).astype(complex)
    return linalg.expm(generator_builder(lowering, lowering.conj().T))[:n_com, :n_com]


def displacement_matrix(alpha: complex, n_com: int) -> np.ndarray:
    return _com_exponential(lambda a, ad: alpha * ad - np.conj(alpha) * a, n_com)


def squeezing_matrix(xi: complex, n_com: int) -> np.ndarray:
    return _com_exponential(lambda a, ad: 0.5 * (np.conj(xi) * a @ a - xi * ad @ ad), n_com)


def embed(block: np.ndarray, basis: ProductBasis) -> np.ndarray:
    """Place an operator on COM ⊗ qubit (qubit index fastest) into the product basis."""
    indices = np.array([n * basis.n_rel + level for n in range(basis.n_com) for level in range(2)])
    matrix = np.zeros((basis.dimension, basis.dimension), dtype=complex)
    matrix[np.ix_(indices, indices)] = block
    return matrix


def _controlled(positive: np.ndarray, negative: np.ndarray, phi: float) -> np.ndarray:
    plus, minus = _projectors(phi)
    return np.kron(positive, plus) + np.kron(negative, minus)


def target_unitary(kind, parameter: complex, phi: float, basis: ProductBasis, c1: float = 0.0) -> TargetUnitary:
    """
    Ideal unitary of a native gate.

    D: D(α); R: exp(−iγ(n̂ + c₁σ̂z)); SR: exp(−iγσ̂_φ/2); S: S(ξ) = exp((ξ*â² − ξâ†²)/2);
    CD: exp((αâ† − α*â)σ̂_φ); CR: exp(iγ n̂ σ̂_φ); CS: exp((ξ*â² − ξâ†²)σ̂_φ/2).

    :param parameter: α, γ or ξ.
    :param c1: Qubit coefficient entering the R gate.
    :raises BasisInadequacyError: When the parameter is too large for the COM cutoff.
    """
    kind = gate_kind(kind)
    n_com = basis.n_com
    if kind in (GateKind.D, GateKind.CD) and abs(parameter) > n_com / 10:
        raise BasisInadequacyError(f"|α|={abs(parameter):.3g} exceeds the reach of {n_com} COM Fock states.")
    if kind.is_squeezing and abs(parameter) > SQUEEZING_LIMIT:
        raise BasisInadequacyError(f"|ξ|={abs(parameter):.3g} exceeds the supported squeezing {SQUEEZING_LIMIT}.")
    phonons = np.arange(n_com)

    if kind == GateKind.D:
        block = np.kron(displacement_matrix(parameter, n_com), IDENTITY_2)
    elif kind == GateKind.S:
        block = np.kron(squeezing_matrix(parameter, n_com), IDENTITY_2)
    elif kind == GateKind.R:
        gamma = parameter.real
        com = np.diag(np.exp(-1j * gamma * phonons))
        qubit = np.diag(np.exp(-1j * gamma * c1 * np.array([1.0, -1.0])))
        block = np.kron(com, qubit)
    elif kind == GateKind.SR:
        gamma = parameter.real
        rotation = np.cos(0.5 * gamma) * IDENTITY_2 - 1j * np.sin(0.5 * gamma) * sigma_phi(phi)
        block = np.kron(np.eye(n_com), rotation)
    elif kind == GateKind.CD:
        block = _controlled(displacement_matrix(parameter, n_com), displacement_matrix(-parameter, n_com), phi)
    elif kind == GateKind.CR:
        gamma = parameter.real
        block = _controlled(np.diag(np.exp(1j * gamma * phonons)), np.diag(np.exp(-1j * gamma * phonons)), phi)
    else:
        block = _controlled(squeezing_matrix(parameter, n_com), squeezing_matrix(-parameter, n_com), phi)
    return TargetUnitary(matrix=embed(block, basis), tag=f"{kind.value}({parameter:.6g}, φ={phi:.6g})")
