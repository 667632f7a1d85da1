import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from tqdm import tqdm

from exceptions import ConfigurationError, CutoffPopulationError
from tomoscope.states import ModePairState, cached_displacement, direct_characteristic

logger = logging.getLogger(__name__)

BRANCHES = ("++", "+-", "-+", "--")
CUTOFF_LIMIT = 1e-8
CUTOFF_LEVELS = 2
DEFAULT_WORKING_DIMENSION = 60
PROBE_ANGLES = (0.0, 0.25 * math.pi, 0.5 * math.pi, 0.75 * math.pi)


@dataclass
class SpinMotionalState:
    """
    Two spins ⊗ COM ⊗ relative motion after the spin-dependent force.

    `branches[s]` is the motional amplitude matrix attached to the S_x eigenstate `BRANCHES[s]`
    of the two spins. The spins start in |g⟩₁|g⟩₂.
    """

    branches: np.ndarray
    beta: complex
    theta: float
    metadata: dict = field(default_factory=dict)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.branches))

    def branch(self, label: str) -> np.ndarray:
        return self.branches[BRANCHES.index(label)]

    def branch_weights(self) -> np.ndarray:
        return np.array([np.linalg.norm(branch) ** 2 for branch in self.branches])


@dataclass(frozen=True)
class CharSample:
    beta_prime: complex
    theta: float
    expectation: float


@dataclass
class CharGrid:
    """χ_R and χ_r sampled on β′ = axis[a] + i·axis[b], arrays indexed [a, b]."""

    axis: np.ndarray
    chi_com: np.ndarray
    chi_rel: np.ndarray
    warnings: list[str] = field(default_factory=list)

    @property
    def spacing(self) -> float:
        return float(self.axis[1] - self.axis[0]) if self.axis.size > 1 else 0.0

    @property
    def beta_prime(self) -> np.ndarray:
        real, imag = np.meshgrid(self.axis, self.axis, indexing="ij")
        return real + 1j * imag

    def rows(self, mode: str = "com"):
        values = self.chi_com if mode == "com" else self.chi_rel
        for beta, value in zip(self.beta_prime.ravel(), values.ravel()):
            yield beta.real, beta.imag, complex(value).real, complex(value).imag


def _working_state(state: ModePairState, dimension: int) -> ModePairState:
    rows, columns = state.shape
    padded = state.padded(max(rows, dimension), max(columns, dimension))
    padded.amplitudes /= padded.norm
    return padded


def _check_cutoff(branches: np.ndarray, beta: complex):
    com_tail = float(np.sum(np.abs(branches[:, -CUTOFF_LEVELS:, :]) ** 2))
    rel_tail = float(np.sum(np.abs(branches[:, :, -CUTOFF_LEVELS:]) ** 2))
    tail = max(com_tail, rel_tail)
    if tail > CUTOFF_LIMIT:
        raise CutoffPopulationError(
            f"Displacement by β={beta:.3g} puts {tail:.3e} on the Fock cutoff of {branches.shape[1:]}."
        )


def apply_protocol(state: ModePairState, beta: complex, theta: float,
                   dimension: int = DEFAULT_WORKING_DIMENSION) -> SpinMotionalState:
    """
    Spin rotation by θ followed by the displacement D_j(2βS_x,j) on each atom.

    In the COM/relative pair the four S_x branches carry
    ½e^{−iθ}D_R(√2β)ψ, ½D_r(√2β)ψ, ½D_r(−√2β)ψ and ½e^{iθ}D_R(−√2β)ψ.

    :param dimension: Minimum number of Fock states per mode in the working space.
    :raises CutoffPopulationError: When a branch puts more than 1e-8 on the top Fock levels.
    """
    psi = _working_state(state, dimension).amplitudes
    beta = complex(beta)
    shift = math.sqrt(2.0) * beta
    n_com, n_rel = psi.shape
    branches = np.empty((4,) + psi.shape, dtype=complex)
    branches[0] = 0.5 * np.exp(-1j * theta) * (cached_displacement(shift, n_com) @ psi)
    branches[1] = 0.5 * (psi @ cached_displacement(shift, n_rel).T)
    branches[2] = 0.5 * (psi @ cached_displacement(-shift, n_rel).T)
    branches[3] = 0.5 * np.exp(1j * theta) * (cached_displacement(-shift, n_com) @ psi)
    _check_cutoff(branches, beta)
    return SpinMotionalState(branches=branches, beta=beta, theta=float(theta))


def joint_sz(state: SpinMotionalState) -> float:
    """
    4⟨S_z1 S_z2⟩; S_z flips each S_x eigenstate, pairing ++ with −− and +− with −+.

    Equals ½cos2θ Re χ_R + ½sin2θ Im χ_R + ½Re χ_r at β′ = 2√2β.
    """
    com = np.vdot(state.branch("--"), state.branch("++"))
    rel = np.vdot(state.branch("-+"), state.branch("+-"))
    return float(np.clip(2.0 * (com.real + rel.real), -1.0, 1.0))


def sample(state: ModePairState, beta_prime: complex, theta: float,
           dimension: int = DEFAULT_WORKING_DIMENSION) -> CharSample:
    beta = complex(beta_prime) / (2.0 * math.sqrt(2.0))
    expectation = joint_sz(apply_protocol(state, beta, theta, dimension))
    return CharSample(beta_prime=complex(beta_prime), theta=float(theta), expectation=expectation)


def characteristic_point(state: ModePairState, beta_prime: complex,
                         dimension: int = DEFAULT_WORKING_DIMENSION) -> tuple[complex, float]:
    """χ_R(β′) and χ_r(β′) from the four probe angles 0, π/4, π/2, 3π/4."""
    j0, j45, j90, j135 = (sample(state, beta_prime, theta, dimension).expectation for theta in PROBE_ANGLES)
    return complex(j0 - j90, j45 - j135), j0 + j90


def symmetric_axis(extent: float, spacing: float) -> np.ndarray:
    if extent <= 0 or spacing <= 0:
        raise ConfigurationError("Grid extent and spacing must be positive.")
    half = int(round(extent / spacing))
    return spacing * np.arange(-half, half + 1)


def _row(arguments) -> tuple[np.ndarray, np.ndarray]:
    state, real, axis, dimension = arguments
    points = [characteristic_point(state, complex(real, imag), dimension) for imag in axis]
    return np.array([point[0] for point in points]), np.array([point[1] for point in points])


def reconstruct(state: ModePairState, axis, dimension: int = DEFAULT_WORKING_DIMENSION,
                threads: int = 1) -> CharGrid:
    """
    Reconstruct χ_R and χ_r on the square grid spanned by `axis`.

    :param axis: Real grid coordinates, symmetric about zero.
    :param threads: Worker processes; rows are assembled in grid order.
    """
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size == 0 or not np.allclose(axis, -axis[::-1]):
        raise ConfigurationError("The β′ grid must be symmetric about zero.")
    jobs = [(state, float(real), axis, dimension) for real in axis]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            rows = list(tqdm(executor.map(_row, jobs), total=len(jobs), desc="χ reconstruction"))
    else:
        rows = [_row(job) for job in tqdm(jobs, desc="χ reconstruction")]
    chi_com = np.array([row[0] for row in rows])
    chi_rel = np.array([row[1] for row in rows])
    grid = CharGrid(axis=axis, chi_com=chi_com, chi_rel=chi_rel)
    logger.info("Reconstructed χ on %d x %d points (spacing %.3g)", axis.size, axis.size, grid.spacing)
    return grid


def direct_grid(state: ModePairState, axis, dimension: int = DEFAULT_WORKING_DIMENSION) -> np.ndarray:
    """⟨ψ|D_R(β′)|ψ⟩ on the same grid, the reference for `reconstruct`."""
    axis = np.asarray(axis, dtype=float)
    working = _working_state(state, dimension)
    return np.array([[direct_characteristic(working, complex(real, imag)) for imag in axis] for real in axis])
