import logging
import math
from dataclasses import dataclass

from scipy import special

from beamforge.geometry import HBAR
from exceptions import ConfigurationError

logger = logging.getLogger(__name__)

ONE_D_VALIDITY = 1.0


@dataclass(frozen=True)
class InteractionParams:
    """
    Contact interaction √π u δ(r̂ₓ) of the relative coordinate.

    `u_prime` is u / ħωx. The scattering-length provenance is kept when the parameters were
    built from it.
    """

    u_prime: float
    omega_x: float | None = None
    scattering_length: float | None = None

    def __post_init__(self):
        if not self.u_prime >= 0:
            raise ConfigurationError("Interaction strength u′ must be non-negative.")
        if self.beyond_one_d:
            logger.warning("u′=%.3f exceeds %.1f; the effective 1D description is questionable",
                           self.u_prime, ONE_D_VALIDITY)

    @property
    def beyond_one_d(self) -> bool:
        return self.u_prime > ONE_D_VALIDITY

    @property
    def u(self) -> float:
        """Interaction energy in joules."""
        if self.omega_x is None:
            raise ConfigurationError("Interaction energy needs ωx.")
        return self.u_prime * HBAR * self.omega_x

    @classmethod
    def from_scattering_length(cls, a_s: float, mass: float, omega_x: float, omega_y: float,
                               omega_z: float) -> "InteractionParams":
        """
        u = a_s √(2ħ m ωx ωy ωz / π) for transverse confinement frozen in the ground state.

        :param a_s: s-wave scattering length in metres.
        :param mass: Atomic mass in kg.
        :return: Parameters with u′ = u / ħωx.
        """
        u = a_s * math.sqrt(2.0 * HBAR * mass * omega_x * omega_y * omega_z / math.pi)
        return cls(u_prime=u / (HBAR * omega_x), omega_x=omega_x, scattering_length=a_s)


def central_density_weight(m: int) -> float:
    """C(2m, m) / 4^m, the squared harmonic amplitude √π |φ_2m(0)|²."""
    return math.exp(special.gammaln(2 * m + 1) - 2.0 * special.gammaln(m + 1) - 2.0 * m * math.log(2.0))


def interaction_matrix_element(m: int, n: int, u: float) -> float:
    """V_mn = u (−½)^{m+n} √(C(2m,m) C(2n,n)) between even harmonic states |2m⟩ and |2n⟩."""
    if m < 0 or n < 0:
        raise ValueError("Harmonic indices must be non-negative.")
    return u * (-1.0) ** (m + n) * math.sqrt(central_density_weight(m) * central_density_weight(n))


def perturbative_energies(u_prime: float) -> tuple[float, float, float]:
    """Second-order energies of the three lowest even levels, in units of ħωx."""
    return (
        0.5 + u_prime - 0.69 * u_prime ** 2,
        2.5 + 0.5 * u_prime - 0.048 * u_prime ** 2,
        4.5 + 0.375 * u_prime - 0.01544 * u_prime ** 2,
    )


def perturbative_coefficients(u_prime: float) -> dict[str, float]:
    """First-order qubit coefficients; used as a reference for the exact elements."""
    return {
        "c1": -1.0 + u_prime / 8.0,
        "c2": math.sqrt(2.0) / 2.0 + 5.0 * math.sqrt(2.0) / 16.0 * u_prime,
        "c2p": math.sqrt(3.0) + 5.0 * math.sqrt(3.0) / 32.0 * u_prime,
        "c3": 3.0 * math.sqrt(2.0) / 2.0 + 23.0 * math.sqrt(2.0) / 16.0 * u_prime,
    }
