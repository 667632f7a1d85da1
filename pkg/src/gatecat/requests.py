import cmath
import enum
import math
from dataclasses import asdict, dataclass

from exceptions import ConfigurationError, ResonanceError, UnsupportedGateError
from relmode.elements import QubitCoefficients, qubit_coefficients
from relmode.spectrum import RelativeSpectrum

RESONANCE_GUARD = 1e-3


class GateKind(str, enum.Enum):
    D = "D"
    R = "R"
    SR = "SR"
    S = "S"
    CD = "CD"
    CR = "CR"
    CS = "CS"

    @property
    def is_rotation(self) -> bool:
        return self in (GateKind.R, GateKind.SR, GateKind.CR)

    @property
    def is_squeezing(self) -> bool:
        return self in (GateKind.S, GateKind.CS)

    @property
    def is_controlled(self) -> bool:
        return self in (GateKind.CD, GateKind.CR, GateKind.CS)

    @property
    def default_layout(self) -> str:
        return "five_beam" if self in (GateKind.D, GateKind.CD) else "three_beam"


def gate_kind(value) -> GateKind:
    try:
        return GateKind(value)
    except ValueError:
        raise UnsupportedGateError(f"Unknown gate kind '{value}'.") from None


@dataclass(frozen=True)
class GateRequest:
    """
    One native gate: |α| for D/CD, γ for R/SR/CR, |ξ| for S/CS.

    At most one of `lam` and `duration` (seconds) is given; the other follows from the
    parameter map. With neither, λ is optimized.
    """

    kind: GateKind
    magnitude: float
    theta: float = 0.0
    phi: float = 0.0
    lam: float | None = None
    duration: float | None = None
    u_prime: float | None = None
    layout: str | None = None
    corrections: bool = True
    initial_alpha: complex | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", gate_kind(self.kind))
        if not self.magnitude >= 0:
            raise ConfigurationError("Gate magnitude must be non-negative.")
        if self.lam is not None and self.duration is not None:
            raise ConfigurationError("Give either λ or the duration; the other follows from the magnitude.")
        if self.lam is not None and not 0 < self.lam < 1:
            raise ConfigurationError("Modulation strength λ must lie in (0, 1).")
        if self.duration is not None and self.duration < 0:
            raise ConfigurationError("Gate duration must be non-negative.")

    @property
    def optimize(self) -> bool:
        return self.lam is None and self.duration is None

    @property
    def start_alpha(self) -> complex:
        if self.initial_alpha is not None:
            return complex(self.initial_alpha)
        return 1.0 if self.kind.is_rotation else 0.0

    def with_lambda(self, lam: float) -> "GateRequest":
        values = asdict(self)
        values.update(lam=lam, duration=None)
        return GateRequest(**values)

    def to_dict(self) -> dict:
        values = asdict(self)
        values["kind"] = self.kind.value
        alpha = self.start_alpha
        values["initial_alpha"] = [alpha.real, alpha.imag]
        return values


def parameter_rate(kind, eps_x: float, coefficients: QubitCoefficients | None) -> float:
    """Gate parameter per unit λ·ωxT."""
    kind = gate_kind(kind)
    if kind == GateKind.D:
        return 1.0 / (8.0 * eps_x)
    if kind == GateKind.R:
        return 0.25
    if kind == GateKind.S:
        return 0.125
    if coefficients is None:
        raise ConfigurationError(f"The {kind.value} map needs the qubit coefficients.")
    c2 = coefficients.c2
    if kind == GateKind.SR:
        return 0.25 * c2
    if kind == GateKind.CD:
        return 3.0 * eps_x * c2 / 16.0
    if kind == GateKind.CR:
        return 0.75 * eps_x ** 2 * c2
    return 3.0 * eps_x ** 2 * c2 / 8.0


def parameter_map(kind, lam: float, tau: float, eps_x: float, coefficients: QubitCoefficients | None = None,
                  theta: float = 0.0) -> complex:
    """
    Gate parameter reached with strength λ over τ = ωxT.

    Displacements and squeezings carry the phase e^{iθ}; rotation angles are real.
    """
    kind = gate_kind(kind)
    value = lam * tau * parameter_rate(kind, eps_x, coefficients)
    if kind.is_rotation:
        return complex(value)
    return value * cmath.exp(1j * theta)


def duration_for(kind, lam: float, magnitude: float, eps_x: float,
                 coefficients: QubitCoefficients | None = None) -> float:
    """τ = ωxT giving `magnitude` at strength λ."""
    if lam <= 0:
        raise ConfigurationError("λ must be positive to reach a non-zero magnitude.")
    return magnitude / (lam * parameter_rate(kind, eps_x, coefficients))


def lambda_for(kind, tau: float, magnitude: float, eps_x: float,
               coefficients: QubitCoefficients | None = None) -> float:
    if tau <= 0:
        raise ConfigurationError("Duration must be positive to reach a non-zero magnitude.")
    return magnitude / (tau * parameter_rate(kind, eps_x, coefficients))


@dataclass(frozen=True)
class CorrectionSettings:
    """Frame detunings Δ (COM) and δ (qubit) in units of ωx."""

    delta_com: float = 0.0
    delta_qubit: float = 0.0

    @property
    def active(self) -> bool:
        return self.delta_com != 0.0 or self.delta_qubit != 0.0

    def in_rad_per_s(self, omega_x: float) -> tuple[float, float]:
        return self.delta_com * omega_x, self.delta_qubit * omega_x

    def to_dict(self) -> dict[str, float]:
        return {"delta_com": self.delta_com, "delta_qubit": self.delta_qubit}


def correction_settings(kind, lam: float, spectrum: RelativeSpectrum,
                        coefficients: QubitCoefficients | None = None) -> CorrectionSettings:
    """
    Detunings cancelling the second-order n̂ and σ̂_z terms of the R and SR effective Hamiltonians.

    :param spectrum: Supplies the exact gaps ω̃ and ω̃′ in units of ωx.
    :param coefficients: Qubit coefficients of `spectrum`, computed when omitted.
    :raises ResonanceError: When the two gaps are degenerate within the guard.
    """
    kind = gate_kind(kind)
    if not 0 <= lam < 1:
        raise ConfigurationError("Corrections are derived for 0 ≤ λ < 1.")
    omega_tilde, omega_tilde_prime = spectrum.omega_tilde, spectrum.omega_tilde_prime
    coefficients = coefficients or qubit_coefficients(spectrum)
    if abs(omega_tilde - omega_tilde_prime) < RESONANCE_GUARD:
        raise ResonanceError(
            f"ω̃={omega_tilde:.6f} and ω̃′={omega_tilde_prime:.6f} are degenerate; corrections diverge."
        )
    c1, c2, c2p = coefficients.c1, coefficients.c2, coefficients.c2p
    if kind == GateKind.R:
        delta_com = -lam / 4.0 + lam ** 2 / (32.0 * omega_tilde)
        delta_qubit = (lam * c1 / 2.0 - lam ** 2 * c2 ** 2 / (8.0 * omega_tilde)
                       + lam ** 2 * c2p ** 2 / (16.0 * omega_tilde_prime))
    elif kind == GateKind.SR:
        delta_com = lam ** 2 / 64.0 * (1.0 / (2.0 - omega_tilde) + 1.0 / (2.0 + omega_tilde))
        delta_qubit = -2.0 * (
            lam ** 2 * c2 ** 2 / (128.0 * omega_tilde)
            + lam ** 2 * c2p ** 2 / 128.0 * (1.0 / (omega_tilde - omega_tilde_prime)
                                             - 1.0 / (omega_tilde + omega_tilde_prime))
        )
    else:
        raise UnsupportedGateError(f"No frame correction is defined for {kind.value}.")
    return CorrectionSettings(delta_com=delta_com, delta_qubit=delta_qubit)


def corrected_rotation_duration(gamma: float, corrections: CorrectionSettings) -> float:
    """τ at which the second-order phonon rate −Δ = λ/4 − λ²/(32ω̃) turns the oscillator by γ."""
    rate = -corrections.delta_com
    if rate <= 0:
        raise ConfigurationError("The corrected R phonon rate is not positive; lower λ.")
    return gamma / rate


def corrected_rotation_strength(gamma: float, tau: float, omega_tilde: float) -> float:
    """Smaller root λ of τ(λ/4 − λ²/(32ω̃)) = γ."""
    if tau <= 0:
        raise ConfigurationError("Duration must be positive to reach a non-zero magnitude.")
    discriminant = 1.0 / 16.0 - gamma / (8.0 * omega_tilde * tau)
    if discriminant < 0:
        raise ConfigurationError(f"No λ reaches γ={gamma:.4g} within τ={tau:.4g}.")
    return 16.0 * omega_tilde * (0.25 - math.sqrt(discriminant))


def rotation_qubit_frame(corrections: CorrectionSettings, c1: float) -> CorrectionSettings:
    """
    Qubit-only frame leaving exactly γc₁ of σ̂z phase once τ follows the corrected phonon rate.

    The residual rate δ/2 − c₁(−Δ) vanishes at first order in λ.
    """
    return CorrectionSettings(delta_qubit=corrections.delta_qubit + 2.0 * c1 * corrections.delta_com)


def magnitude_of(kind, parameter: complex) -> float:
    kind = gate_kind(kind)
    return float(parameter.real) if kind.is_rotation else float(abs(parameter))


def phase_of(parameter: complex) -> float:
    return float(cmath.phase(parameter)) if parameter != 0 else 0.0


def gate_time_seconds(tau: float, omega_x: float) -> float:
    return tau / omega_x


def tau_from_seconds(duration: float, omega_x: float) -> float:
    return duration * omega_x


def wrap_phase(angle: float) -> float:
    return (angle + math.pi) % (2.0 * math.pi) - math.pi
