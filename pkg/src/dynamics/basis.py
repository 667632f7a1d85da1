import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from exceptions import BasisInadequacyError, ConfigurationError

ADEQUACY_THRESHOLD = 1e-8


@dataclass(frozen=True)
class ProductBasis:
    """
    COM Fock states ⊗ dressed relative levels, flattened COM-major: index = n · n_rel + ĩ.

    Relative level 0 is |↑⟩ = |0̃⟩ and level 1 is |↓⟩ = |2̃⟩; levels from 2 on are leakage.
    """

    n_com: int
    n_rel: int

    def __post_init__(self):
        if self.n_com < 2:
            raise ConfigurationError("The COM basis needs at least two Fock states.")
        if self.n_rel < 2:
            raise ConfigurationError("The relative basis needs at least the two qubit levels.")

    @property
    def dimension(self) -> int:
        return self.n_com * self.n_rel

    def index(self, n: int, level: int) -> int:
        if not (0 <= n < self.n_com and 0 <= level < self.n_rel):
            raise IndexError(f"({n}, {level}) is outside the {self.n_com}x{self.n_rel} product basis.")
        return n * self.n_rel + level

    def unpack(self, flat: int) -> tuple[int, int]:
        return divmod(flat, self.n_rel)

    def com_operator(self, operator: np.ndarray) -> np.ndarray:
        return np.kron(operator, np.eye(self.n_rel))

    def rel_operator(self, operator: np.ndarray) -> np.ndarray:
        return np.kron(np.eye(self.n_com), operator)

    def to_dict(self) -> dict[str, int]:
        return {"n_com": self.n_com, "n_rel": self.n_rel}


def annihilation(dimension: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dimension, dtype=float)), 1)


def com_position_power(n_com: int, power: int) -> np.ndarray:
    """R̂^power = ((â + â†)/√2)^power on the first n_com Fock states, exact through padding."""
    padded = n_com + power
    lowering = annihilation(padded)
    position = (lowering + lowering.T) / math.sqrt(2.0)
    return np.linalg.matrix_power(position, power)[:n_com, :n_com]


def coherent_amplitudes(alpha: complex, dimension: int) -> np.ndarray:
    """e^{−|α|²/2} αⁿ / √n! for n < dimension, renormalized on the truncated space."""
    n = np.arange(dimension)
    if alpha == 0:
        amplitudes = np.zeros(dimension, dtype=complex)
        amplitudes[0] = 1.0
        return amplitudes
    log_magnitude = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * special.gammaln(n + 1)
    amplitudes = np.exp(log_magnitude) * np.exp(1j * n * np.angle(alpha))
    return amplitudes / np.linalg.norm(amplitudes)


@dataclass
class MotionalState:
    amplitudes: np.ndarray
    basis: ProductBasis
    time: float = 0.0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.basis.dimension,):
            raise ConfigurationError(
                f"State has shape {self.amplitudes.shape}, basis needs ({self.basis.dimension},)."
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to (n_com, n_rel)."""
        return self.amplitudes.reshape(self.basis.n_com, self.basis.n_rel)

    def copy(self) -> "MotionalState":
        return MotionalState(self.amplitudes.copy(), self.basis, self.time, dict(self.metadata))

    @classmethod
    def product(cls, basis: ProductBasis, com, rel) -> "MotionalState":
        com = np.asarray(com, dtype=complex)
        rel = np.asarray(rel, dtype=complex)
        if com.size != basis.n_com or rel.size != basis.n_rel:
            raise ConfigurationError("Factor sizes do not match the product basis.")
        return cls(np.kron(com, rel), basis)

    @classmethod
    def ground(cls, basis: ProductBasis) -> "MotionalState":
        """|↑⟩|0⟩: dressed relative ground state and COM vacuum."""
        return cls.coherent(basis, 0.0)

    @classmethod
    def coherent(cls, basis: ProductBasis, alpha: complex, qubit=(1.0, 0.0)) -> "MotionalState":
        """COM coherent state |α⟩ times the qubit superposition a|↑⟩ + b|↓⟩."""
        if abs(alpha) > basis.n_com / 4:
            raise BasisInadequacyError(f"|α|={abs(alpha):.3g} is too large for {basis.n_com} COM Fock states.")
        rel = np.zeros(basis.n_rel, dtype=complex)
        rel[:2] = np.asarray(qubit, dtype=complex) / np.linalg.norm(qubit)
        return cls.product(basis, coherent_amplitudes(alpha, basis.n_com), rel)


@dataclass(frozen=True)
class Observables:
    mean_phonons: float
    population_up: float
    population_down: float
    leakage: float
    mean_position: float
    mean_position_squared: float
    mean_lowering: complex
    mean_lowering_squared: complex
    cutoff_population: float

    def to_dict(self) -> dict:
        return {
            "mean_phonons": self.mean_phonons,
            "population_up": self.population_up,
            "population_down": self.population_down,
            "leakage": self.leakage,
            "mean_position": self.mean_position,
            "mean_position_squared": self.mean_position_squared,
            "mean_lowering": [self.mean_lowering.real, self.mean_lowering.imag],
            "mean_lowering_squared": [self.mean_lowering_squared.real, self.mean_lowering_squared.imag],
            "cutoff_population": self.cutoff_population,
        }


def cutoff_population(state: MotionalState, levels: int = 2) -> float:
    """Population on the top `levels` COM Fock states."""
    return float(np.sum(np.abs(state.as_matrix()[-levels:, :]) ** 2))


def observables(state: MotionalState) -> Observables:
    matrix = state.as_matrix()
    n_com = state.basis.n_com
    populations = np.abs(matrix) ** 2
    level_weights = populations.sum(axis=0)
    phonons = np.arange(n_com)
    lowering = annihilation(n_com)
    lowered = lowering @ matrix
    twice_lowered = lowering @ lowered
    mean_lowering = complex(np.vdot(matrix, lowered))
    mean_lowering_squared = complex(np.vdot(matrix, twice_lowered))
    mean_phonons = float(populations.sum(axis=1) @ phonons)
    return Observables(
        mean_phonons=mean_phonons,
        population_up=float(level_weights[0]),
        population_down=float(level_weights[1]),
        leakage=float(level_weights[2:].sum()),
        mean_position=math.sqrt(2.0) * mean_lowering.real,
        mean_position_squared=float(mean_lowering_squared.real + mean_phonons + 0.5),
        mean_lowering=mean_lowering,
        mean_lowering_squared=mean_lowering_squared,
        cutoff_population=cutoff_population(state),
    )
