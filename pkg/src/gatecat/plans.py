import math
from dataclasses import dataclass

from beamforge.depths import DepthSchedule, Tone, Waveform, build_schedule
from beamforge.geometry import BeamGeometry, TrapLayout
from exceptions import ConfigurationError
from gatecat.requests import CorrectionSettings, GateKind, GateRequest
from relmode.elements import qubit_coefficients
from relmode.spectrum import RelativeSpectrum

QUARTER_TURN = 0.5 * math.pi


@dataclass(frozen=True)
class WaveformPlan:
    """Modulating terms of one gate and the beam layout realizing them."""

    kind: GateKind
    waveforms: tuple[Waveform, ...]
    layout: TrapLayout
    omega_tilde: float
    corrections: CorrectionSettings = CorrectionSettings()

    @property
    def tones(self) -> tuple[float, ...]:
        return tuple(tone.frequency for waveform in self.waveforms for tone in waveform.tones)

    def schedule(self, geometry: BeamGeometry, lam: float, tau: float, check: bool = True) -> DepthSchedule:
        return build_schedule(self.layout, geometry, self.waveforms, lam, tau, check=check)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "layout": self.layout.to_dict(),
            "omega_tilde": self.omega_tilde,
            "corrections": self.corrections.to_dict(),
            "waveforms": [
                {
                    "order": waveform.order,
                    "amplitude": waveform.amplitude,
                    "tones": [
                        {"frequency": tone.frequency, "phase": tone.phase, "sign": tone.sign}
                        for tone in waveform.tones
                    ],
                }
                for waveform in self.waveforms
            ],
        }


def plan_waveforms(request: GateRequest, spectrum: RelativeSpectrum, geometry: BeamGeometry, layout: TrapLayout,
                   corrections: CorrectionSettings | None = None) -> WaveformPlan:
    """
    Waveforms of the native gate set, amplitudes in units of λV0, tones in units of ωx.

    Tones are generated in the frame shifted by the corrections: ωx − Δ for the COM and
    ω̃ − δ for the qubit.

    :raises ConfigurationError: When the layout cannot control an order the gate needs.
    """
    corrections = corrections or CorrectionSettings()
    coefficients = qubit_coefficients(spectrum)
    omega_tilde, eps_x = spectrum.omega_tilde, geometry.eps_x
    kind, theta, phi = request.kind, request.theta, request.phi
    trap = 1.0 - corrections.delta_com
    qubit = omega_tilde - corrections.delta_qubit

    if kind == GateKind.D:
        waveforms = (Waveform(1, 1.0, (Tone(trap, -theta),)),)
    elif kind == GateKind.R:
        waveforms = (Waveform(2, 1.0),)
    elif kind == GateKind.SR:
        waveforms = (Waveform(2, 1.0, (Tone(qubit, -phi + QUARTER_TURN),)),)
    elif kind == GateKind.S:
        waveforms = (Waveform(2, 1.0, (Tone(2.0 * trap, -theta, -1.0),)),)
    elif kind == GateKind.CD:
        waveforms = (
            Waveform(3, 1.0, (Tone(qubit + trap, -theta - phi), Tone(qubit - trap, theta - phi, -1.0))),
        )
    elif kind == GateKind.CR:
        cosine = (Tone(qubit, -phi + QUARTER_TURN),)
        waveforms = (
            Waveform(2, eps_x ** 2 * (3.0 + coefficients.c3 / coefficients.c2), cosine),
            Waveform(4, -2.0, cosine),
        )
    else:
        waveforms = (
            Waveform(4, 1.0, (Tone(2.0 * trap + qubit, -theta - phi, -1.0),
                              Tone(2.0 * trap - qubit, -theta + phi, -1.0))),
        )

    controllable = layout.controlled_orders
    for waveform in waveforms:
        if waveform.order not in controllable:
            raise ConfigurationError(
                f"Layout '{layout.name}' cannot modulate order {waveform.order} needed by {kind.value}."
            )
    return WaveformPlan(kind=kind, waveforms=waveforms, layout=layout, omega_tilde=omega_tilde,
                        corrections=corrections)
