from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from dynamics.basis import MotionalState, coherent_amplitudes
from exceptions import BasisInadequacyError, ConfigurationError
from gatecat.targets import displacement_matrix, squeezing_matrix
from relmode.spectrum import RelativeSpectrum

LOST_WEIGHT_LIMIT = 1e-8


@dataclass
class ModePairState:
    """
    Motional state over COM Fock ⊗ harmonic relative Fock states (all parities).

    `amplitudes[n, m]` is the amplitude of |n⟩_R |m⟩_r.
    """

    amplitudes: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.ndim != 2:
            raise ConfigurationError("Mode-pair amplitudes must be a (n_com, n_rel) matrix.")

    @property
    def shape(self) -> tuple[int, int]:
        return self.amplitudes.shape

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def padded(self, n_com: int, n_rel: int) -> "ModePairState":
        rows, columns = self.shape
        if rows > n_com or columns > n_rel:
            raise BasisInadequacyError(f"Cannot fit a {rows}x{columns} state into {n_com}x{n_rel}.")
        amplitudes = np.zeros((n_com, n_rel), dtype=complex)
        amplitudes[:rows, :columns] = self.amplitudes
        return ModePairState(amplitudes, dict(self.metadata))

    @classmethod
    def product(cls, com, rel=None, n_rel: int = 2) -> "ModePairState":
        """COM amplitudes times a relative state, the relative ground state by default."""
        com = np.asarray(com, dtype=complex)
        if rel is None:
            rel = np.zeros(n_rel, dtype=complex)
            rel[0] = 1.0
        return cls(np.outer(com, np.asarray(rel, dtype=complex)))

    @classmethod
    def from_motional(cls, state: MotionalState, n_rel: int,
                      spectrum: RelativeSpectrum | None = None) -> "ModePairState":
        """
        Carry a gate-module state over to COM ⊗ harmonic relative Fock states.

        Without a spectrum, dressed level ĩ is identified with |2i⟩ (interaction switched off for the
        protocol); χ_R is unaffected by the choice. With a spectrum, the dressed levels are re-expanded.

        :param n_rel: Number of harmonic relative states kept.
        :raises BasisInadequacyError: When the re-expansion drops more than 1e-8 of the norm.
        """
        levels = state.basis.n_rel
        if spectrum is None:
            if 2 * levels - 1 > n_rel:
                raise BasisInadequacyError(f"{levels} dressed levels need {2 * levels - 1} relative Fock states.")
            harmonic = np.zeros((state.basis.n_com, n_rel), dtype=complex)
            harmonic[:, 0:2 * levels:2] = state.as_matrix()
            return cls(harmonic, {"source": "motional", "relative_map": "identified"})
        if spectrum.dimension < levels:
            raise BasisInadequacyError(f"The spectrum holds {spectrum.dimension} levels, the state uses {levels}.")
        even = spectrum.eigenvectors[:, :levels]
        harmonic = np.zeros((state.basis.n_com, n_rel), dtype=complex)
        kept = min(even.shape[0], (n_rel + 1) // 2)
        harmonic[:, 0:2 * kept:2] = state.as_matrix() @ even[:kept].T
        lost = state.norm ** 2 - np.linalg.norm(harmonic) ** 2
        if lost > LOST_WEIGHT_LIMIT:
            raise BasisInadequacyError(f"Truncating to {n_rel} relative Fock states loses {lost:.3e} of the norm.")
        return cls(harmonic, {"source": "motional", "u_prime": spectrum.u_prime})


def vacuum_state(n_com: int) -> ModePairState:
    return ModePairState.product(coherent_amplitudes(0.0, n_com))


def coherent_state(alpha: complex, n_com: int) -> ModePairState:
    if abs(alpha) > n_com / 4:
        raise BasisInadequacyError(f"|α|={abs(alpha):.3g} is too large for {n_com} COM Fock states.")
    state = ModePairState.product(coherent_amplitudes(alpha, n_com))
    state.metadata["alpha"] = [complex(alpha).real, complex(alpha).imag]
    return state


def cat_state(alpha: complex, n_com: int, parity: int = 1) -> ModePairState:
    """(|α⟩ ± |−α⟩)/N on the COM mode."""
    if parity not in (1, -1):
        raise ConfigurationError("Cat parity must be +1 or -1.")
    if alpha == 0 and parity == -1:
        raise ConfigurationError("The odd cat state is undefined at α = 0.")
    com = coherent_amplitudes(alpha, n_com) + parity * coherent_amplitudes(-alpha, n_com)
    state = ModePairState.product(com / np.linalg.norm(com))
    state.metadata.update(alpha=[complex(alpha).real, complex(alpha).imag], parity=parity)
    return state


def squeezed_state(xi: complex, n_com: int) -> ModePairState:
    """S(ξ)|0⟩ with S(ξ) = exp((ξ*â² − ξâ†²)/2)."""
    com = squeezing_matrix(xi, n_com)[:, 0]
    state = ModePairState.product(com / np.linalg.norm(com))
    state.metadata["xi"] = [complex(xi).real, complex(xi).imag]
    return state


@lru_cache(maxsize=4096)
def cached_displacement(beta: complex, dimension: int) -> np.ndarray:
    matrix = displacement_matrix(complex(beta), dimension)
    matrix.setflags(write=False)
    return matrix


def direct_characteristic(state: ModePairState, beta: complex, mode: str = "com") -> complex:
    """⟨ψ|D(β)|ψ⟩ of the COM ("com") or relative ("rel") mode."""
    amplitudes = state.amplitudes / state.norm
    if mode == "com":
        displaced = cached_displacement(beta, amplitudes.shape[0]) @ amplitudes
    elif mode == "rel":
        displaced = amplitudes @ cached_displacement(beta, amplitudes.shape[1]).T
    else:
        raise ConfigurationError(f"Unknown mode '{mode}'.")
    return complex(np.vdot(amplitudes, displaced))


def coherent_characteristic(alpha: complex, beta) -> np.ndarray:
    """Closed form e^{−|β|²/2} e^{βα* − β*α} for a coherent state."""
    beta = np.asarray(beta, dtype=complex)
    return np.exp(-0.5 * np.abs(beta) ** 2 + beta * np.conj(alpha) - np.conj(beta) * alpha)
