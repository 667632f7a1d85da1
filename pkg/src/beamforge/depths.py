import logging
import math
from dataclasses import dataclass, field

import numpy as np

from beamforge.coefficients import axial_coefficient, build_coeff_matrix
from beamforge.geometry import BeamGeometry, TrapLayout
from exceptions import ConfigurationError, InfeasibleDepthError

logger = logging.getLogger(__name__)

SAMPLES_PER_PERIOD = 64
RESIDUAL_TOLERANCE = 1e-10
HARMONIC_TARGET = 2.0


@dataclass(frozen=True)
class Tone:
    """One sinusoid sign·sin(frequency·τ + phase); frequency in units of ωx."""

    frequency: float
    phase: float = 0.0
    sign: float = 1.0

    def __call__(self, t):
        return self.sign * np.sin(self.frequency * np.asarray(t, dtype=float) + self.phase)


@dataclass(frozen=True)
class Waveform:
    """
    Time dependence of one controlled order, V_k(τ) = λ V0 · amplitude · Σ tones(τ).

    A waveform without tones is a DC step of height `amplitude`.
    """

    order: int
    amplitude: float
    tones: tuple[Tone, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "tones", tuple(self.tones))
        if self.order < 1:
            raise ConfigurationError("Waveform order must be at least 1.")
        if not math.isfinite(self.amplitude):
            raise ConfigurationError("Waveform amplitude must be finite.")
        if len(self.tones) > 2:
            raise ConfigurationError("A waveform carries at most two tones.")

    @property
    def fastest_frequency(self) -> float:
        return max((abs(tone.frequency) for tone in self.tones), default=0.0)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if not self.tones:
            return np.full_like(t, self.amplitude)
        return self.amplitude * sum(tone(t) for tone in self.tones)


@dataclass(frozen=True)
class DepthSchedule:
    """
    U(τ) = U⁽⁰⁾ + λ Σ_w w(τ) ΔU_w, all depths in units of V0.

    `responses[w]` is the depth change producing a unit amplitude on the order of waveform `w`.
    """

    layout: TrapLayout
    base_depths: np.ndarray
    lam: float = 0.0
    waveforms: tuple[Waveform, ...] = ()
    responses: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    duration: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "waveforms", tuple(self.waveforms))
        object.__setattr__(self, "base_depths", np.asarray(self.base_depths, dtype=float))
        responses = np.asarray(self.responses, dtype=float).reshape(len(self.waveforms), len(self.base_depths))
        object.__setattr__(self, "responses", responses)
        self.base_depths.setflags(write=False)
        self.responses.setflags(write=False)

    @property
    def fastest_frequency(self) -> float:
        return max((w.fastest_frequency for w in self.waveforms), default=0.0)

    def modulation(self, t) -> np.ndarray:
        """Σ_w w(τ) ΔU_w per unit λ; shape (len(t), j_max)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        result = np.zeros((t.size, self.base_depths.size))
        for waveform, response in zip(self.waveforms, self.responses):
            result += np.outer(waveform(t), response)
        return result

    def depths(self, t) -> np.ndarray:
        return self.base_depths[None, :] + self.lam * self.modulation(t)

    def time_grid(self, duration: float | None = None) -> np.ndarray:
        duration = self.duration if duration is None else duration
        periods = duration * self.fastest_frequency / (2.0 * math.pi)
        samples = max(SAMPLES_PER_PERIOD, int(math.ceil(periods * SAMPLES_PER_PERIOD)) + 1)
        return np.linspace(0.0, duration, samples)

    def check_positivity(self, duration: float | None = None) -> None:
        """
        Verify every beam depth stays non-negative over the gate.

        :raises InfeasibleDepthError: With the first violating time and beam index.
        """
        grid = self.time_grid(duration)
        values = self.depths(grid)
        negative = values < 0.0
        if not negative.any():
            return
        step, beam = np.argwhere(negative)[0]
        time = float(grid[step])
        raise InfeasibleDepthError(
            f"Depth of beam {beam} in layout '{self.layout.name}' becomes {values[step, beam]:.4g} V0 "
            f"at τ={time:.6g} (λ={self.lam}).",
            time=time,
            beam=int(beam),
        )

    def order_amplitudes(self, coefficient_entries: np.ndarray, t) -> np.ndarray:
        """V_k(τ) for every row of a coefficient matrix; shape (len(t), n_orders)."""
        return self.depths(t) @ np.asarray(coefficient_entries).T


def symmetric_depths(v2_target: float, v4_target: float, zeta: float, geometry: BeamGeometry) -> np.ndarray:
    """
    Depths (U₁, U₂, U₁) of beams at (−ζ, 0, ζ) producing the given second and fourth orders.

    :param v2_target: V2 in units of V0.
    :param v4_target: V4 in units of V0.
    :return: Array of the three depths in units of V0.
    """
    c2_side, c4_side = axial_coefficient(2, zeta, geometry), axial_coefficient(4, zeta, geometry)
    c2_centre, c4_centre = axial_coefficient(2, 0.0, geometry), axial_coefficient(4, 0.0, geometry)
    denominator = c4_side * c2_centre - c4_centre * c2_side
    if denominator == 0.0:
        raise ConfigurationError(f"Symmetric layout at ζ={zeta} cannot separate orders 2 and 4.")
    centre = (c4_side * v2_target - c2_side * v4_target) / denominator
    side = 0.5 * (-c4_centre * v2_target + c2_centre * v4_target) / denominator
    return np.array([side, centre, side])


def _three_beam_layout(zeta: float) -> TrapLayout:
    return TrapLayout(positions=(-zeta, 0.0, zeta), symmetric=True, k_max=5, name=f"symmetric_{zeta:g}")


def solve_depths_symmetric(v2_target: float, v4_target: float, zeta: float,
                           geometry: BeamGeometry) -> DepthSchedule:
    depths = symmetric_depths(v2_target, v4_target, zeta, geometry)
    if np.any(depths < 0):
        raise InfeasibleDepthError(
            f"Static depths {np.round(depths, 4).tolist()} for V2={v2_target}, V4={v4_target} are negative.",
            time=0.0,
            beam=int(np.argmin(depths)),
        )
    layout = _three_beam_layout(zeta).with_base_depths(depths)
    return DepthSchedule(layout=layout, base_depths=np.array(layout.base_depths))


def solve_depths_general(v_target, layout: TrapLayout, geometry: BeamGeometry) -> DepthSchedule:
    """
    Depths U = C⁻¹ V for a layout with as many beams as controlled orders.

    :raises InfeasibleDepthError: When a depth is negative.
    :raises SingularLayoutError: When C is singular or ill-conditioned.
    """
    v_target = np.asarray(v_target, dtype=float)
    matrix = build_coeff_matrix(layout, geometry, orders=range(1, v_target.size + 1))
    depths = matrix.solve(v_target)
    residual = np.max(np.abs(matrix.amplitudes(depths) - v_target), initial=0.0)
    if residual > RESIDUAL_TOLERANCE:
        logger.warning("Depth solve for '%s' leaves a residual of %.3e V0", layout.name, residual)
    if np.any(depths < 0):
        beam = int(np.argmin(depths))
        raise InfeasibleDepthError(
            f"Layout '{layout.name}' needs a negative depth {depths[beam]:.4g} V0 on beam {beam}.",
            time=0.0,
            beam=beam,
        )
    return DepthSchedule(layout=layout.with_base_depths(depths), base_depths=depths)


def _unit_responses(layout: TrapLayout, geometry: BeamGeometry, waveforms) -> np.ndarray:
    if layout.symmetric:
        if len(layout.positions) != 3:
            raise ConfigurationError("Symmetric schedules are built on three-beam layouts.")
        zeta = layout.positions[2]
        responses = []
        for waveform in waveforms:
            if waveform.order not in (2, 4):
                raise ConfigurationError(
                    f"Symmetric layout '{layout.name}' cannot modulate order {waveform.order}."
                )
            unit = (1.0, 0.0) if waveform.order == 2 else (0.0, 1.0)
            responses.append(symmetric_depths(*unit, zeta, geometry))
        return np.array(responses).reshape(len(responses), 3)
    matrix = build_coeff_matrix(layout, geometry, orders=range(1, len(layout.positions) + 1))
    responses = []
    for waveform in waveforms:
        if waveform.order > len(layout.positions):
            raise ConfigurationError(f"Layout '{layout.name}' does not control order {waveform.order}.")
        unit = np.zeros(len(layout.positions))
        unit[waveform.order - 1] = 1.0
        responses.append(matrix.solve(unit))
    return np.array(responses).reshape(len(responses), len(layout.positions))


def base_depths_for(layout: TrapLayout, geometry: BeamGeometry) -> np.ndarray:
    """Depths making the static potential purely harmonic with V2 = 2 V0 on the controlled orders."""
    if layout.symmetric:
        if layout.j_max != 3:
            raise ConfigurationError(f"Symmetric layout '{layout.name}' must have three beams, got {layout.j_max}.")
        return symmetric_depths(HARMONIC_TARGET, 0.0, layout.positions[2], geometry)
    if layout.j_max < 2:
        raise ConfigurationError(
            f"Layout '{layout.name}' has {layout.j_max} beam; at least two are needed to set the harmonic order."
        )
    target = np.zeros(len(layout.positions))
    target[1] = HARMONIC_TARGET
    return solve_depths_general(target, layout, geometry).base_depths


def build_schedule(layout: TrapLayout, geometry: BeamGeometry, waveforms, lam: float,
                   duration: float, check: bool = True) -> DepthSchedule:
    """
    Base depths plus the λ-scaled modulation for the given waveforms.

    :param layout: Beam positions; base depths are re-solved for a harmonic static trap.
    :param waveforms: Controlled orders and their time dependence.
    :param lam: Modulation strength λ.
    :param duration: Gate duration in units of 1/ωx.
    :param check: Enforce depth positivity on a dense grid over the duration.
    :raises InfeasibleDepthError: When a depth becomes negative during the gate.
    """
    waveforms = tuple(waveforms)
    base = base_depths_for(layout, geometry)
    schedule = DepthSchedule(
        layout=layout.with_base_depths(base),
        base_depths=base,
        lam=lam,
        waveforms=waveforms,
        responses=_unit_responses(layout, geometry, waveforms),
        duration=duration,
    )
    if check:
        schedule.check_positivity()
    return schedule


def modulation_limit(schedule: DepthSchedule, duration: float | None = None) -> float:
    """Largest λ for which every depth stays non-negative over the duration."""
    grid = schedule.time_grid(duration)
    modulation = schedule.modulation(grid)
    base = np.broadcast_to(schedule.base_depths, modulation.shape)
    pulling_down = modulation < 0.0
    if not pulling_down.any():
        return math.inf
    return float(np.min(base[pulling_down] / -modulation[pulling_down]))
