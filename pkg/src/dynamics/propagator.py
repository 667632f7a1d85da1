import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import linalg

from dynamics.assembly import DriveAssembly
from dynamics.basis import MotionalState, cutoff_population
from exceptions import AccuracyCheckError, ConfigurationError, CutoffPopulationError, NormDriftError

logger = logging.getLogger(__name__)

TRIPLE_JUMP_OUTER = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
TRIPLE_JUMP_INNER = 1.0 - 2.0 * TRIPLE_JUMP_OUTER
HALF_STEP_THRESHOLD = 1e-9
TRACE_EVERY = 256
ADEQUACY_THRESHOLD = 1e-8


@dataclass(frozen=True)
class PropagatorConfig:
    """
    Fixed-step settings; time is in units of 1/ωx.

    The step is the smaller of one `steps_per_period`-th of the fastest tone period and
    `step_norm_limit` over the largest drive norm.
    """

    steps_per_period: int = 64
    order: int = 4
    norm_tolerance: float = 1e-10
    step_norm_limit: float = 0.2
    cutoff_warning: float = 1e-6
    strict: bool = False
    half_step_check: bool = False

    def __post_init__(self):
        if self.steps_per_period < 40:
            raise ConfigurationError("At least 40 steps per tone period are required.")
        if self.order not in (2, 4):
            raise ConfigurationError("Integrator order must be 2 or 4.")

    @classmethod
    def from_settings(cls, settings, **overrides) -> "PropagatorConfig":
        values = {
            "steps_per_period": settings.STEPS_PER_PERIOD,
            "order": settings.INTEGRATOR_ORDER,
            "norm_tolerance": settings.NORM_TOLERANCE,
            "step_norm_limit": settings.STEP_NORM_LIMIT,
            "cutoff_warning": settings.CUTOFF_WARNING,
        }
        values.update(overrides)
        return cls(**values)


@dataclass
class PropagationDiagnostics:
    norm_drift: float
    cutoff_population: float
    steps: int
    dt: float
    basis: dict
    basis_adequate: bool = True
    half_step_overlap: float | None = None
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


class _Exponential:
    """exp(−i·s·M) for real symmetric M through its eigendecomposition."""

    def __init__(self, matrix: np.ndarray):
        self.values, self.vectors = linalg.eigh(matrix)

    @property
    def norm(self) -> float:
        return float(np.max(np.abs(self.values), initial=0.0))

    def apply(self, psi: np.ndarray, scale: float) -> np.ndarray:
        return self.vectors @ (np.exp(-1j * scale * self.values) * (self.vectors.T @ psi))


class SplittingPropagator:
    """
    Symmetric splitting of H(τ) = H_stat + Σ_g f_g(τ) M_g.

    The static part is exponentiated exactly; each drive group M_g is exponentiated at the
    midpoint of the step. Order four is reached by a triple-jump composition.
    """

    def __init__(self, assembly: DriveAssembly, config: PropagatorConfig):
        self.assembly = assembly
        self.config = config
        static = assembly.static_hamiltonian()
        drives = []
        for waveform, matrix in assembly.drive_groups():
            if waveform.tones:
                drives.append((waveform, _Exponential(matrix)))
            else:
                static = static + matrix
        self.static = _Exponential(0.5 * (static + static.T))
        self.drives = drives

    def step_size(self, duration: float) -> tuple[float, int]:
        fastest = max(1.0, self.assembly.fastest_frequency)
        dt = 2.0 * math.pi / fastest / self.config.steps_per_period
        largest = max((exponential.norm for _, exponential in self.drives), default=0.0)
        if largest > 0:
            dt = min(dt, self.config.step_norm_limit / largest)
        steps = max(1, int(math.ceil(duration / dt)))
        return duration / steps, steps

    def _second_order(self, psi: np.ndarray, t: float, h: float) -> np.ndarray:
        psi = self.static.apply(psi, 0.5 * h)
        if self.drives:
            midpoint = t + 0.5 * h
            values = [float(waveform(midpoint)) for waveform, _ in self.drives]
            if len(self.drives) == 1:
                psi = self.drives[0][1].apply(psi, values[0] * h)
            else:
                for (_, exponential), value in zip(self.drives, values):
                    psi = exponential.apply(psi, 0.5 * value * h)
                for (_, exponential), value in zip(reversed(self.drives), reversed(values)):
                    psi = exponential.apply(psi, 0.5 * value * h)
        return self.static.apply(psi, 0.5 * h)

    def step(self, psi: np.ndarray, t: float, h: float) -> np.ndarray:
        if self.config.order == 2:
            return self._second_order(psi, t, h)
        outer, inner = TRIPLE_JUMP_OUTER * h, TRIPLE_JUMP_INNER * h
        psi = self._second_order(psi, t, outer)
        psi = self._second_order(psi, t + outer, inner)
        return self._second_order(psi, t + outer + inner, outer)

    def run(self, psi: np.ndarray, t0: float, duration: float, steps: int) -> tuple[np.ndarray, list]:
        h = duration / steps
        initial_norm = np.linalg.norm(psi)
        trace = []
        for step in range(steps):
            psi = self.step(psi, t0 + step * h, h)
            if (step + 1) % TRACE_EVERY == 0 or step + 1 == steps:
                drift = abs(np.linalg.norm(psi) - initial_norm)
                trace.append((step + 1, float(drift)))
                if drift > self.config.norm_tolerance:
                    raise NormDriftError(
                        f"Norm drift {drift:.3e} exceeds {self.config.norm_tolerance:.1e} after {step + 1} steps.",
                        trace=trace,
                    )
        return psi, trace


def propagate(state: MotionalState, assembly: DriveAssembly, duration: float,
              config: PropagatorConfig | None = None) -> tuple[MotionalState, PropagationDiagnostics]:
    """
    Integrate i∂ψ/∂τ = H(τ)ψ in the lab frame from `state.time` over `duration`.

    :param state: Initial state on the assembly's basis.
    :param duration: Gate duration in units of 1/ωx; zero returns the state unchanged.
    :return: Final state and diagnostics.
    :raises NormDriftError: When the norm drifts beyond the configured tolerance.
    :raises CutoffPopulationError: In strict mode, when the top COM levels hold too much population.
    :raises AccuracyCheckError: When the optional half-step rerun disagrees.
    """
    config = config or PropagatorConfig()
    if duration < 0:
        raise ConfigurationError("Duration must be non-negative.")
    if state.basis != assembly.basis:
        raise ConfigurationError("State and Hamiltonian live on different bases.")
    propagator = SplittingPropagator(assembly, config)
    if duration == 0:
        final, dt, steps, trace = state.amplitudes.copy(), 0.0, 0, []
    else:
        dt, steps = propagator.step_size(duration)
        final, trace = propagator.run(state.amplitudes, state.time, duration, steps)
    logger.info("Propagated %.4f over %d steps (dt=%.4g)", duration, steps, dt)

    result = MotionalState(final, state.basis, state.time + duration, dict(state.metadata))
    diagnostics = PropagationDiagnostics(
        norm_drift=trace[-1][1] if trace else 0.0,
        cutoff_population=cutoff_population(result),
        steps=steps,
        dt=dt,
        basis=state.basis.to_dict(),
    )
    diagnostics.basis_adequate = diagnostics.cutoff_population < ADEQUACY_THRESHOLD
    if diagnostics.cutoff_population > config.cutoff_warning:
        message = (f"COM cutoff population {diagnostics.cutoff_population:.3e} exceeds "
                   f"{config.cutoff_warning:.1e} with n_com={state.basis.n_com}.")
        if config.strict:
            raise CutoffPopulationError(message)
        logger.warning(message)
        diagnostics.warnings.append(message)

    if config.half_step_check and steps:
        refined, _ = propagator.run(state.amplitudes, state.time, duration, 2 * steps)
        overlap = float(abs(np.vdot(refined, final)) ** 2)
        diagnostics.half_step_overlap = overlap
        if overlap < 1.0 - HALF_STEP_THRESHOLD:
            raise AccuracyCheckError(f"Half-step rerun overlaps the result only to {overlap:.12f}.")
    return result, diagnostics


def gate_fidelity(final: MotionalState, target: np.ndarray, initial: MotionalState, reference_diagonal: np.ndarray,
                  duration: float) -> float:
    """
    F = |⟨ψ₀|Û† e^{iH_ref T} ψ_final⟩|² with a diagonal reference Hamiltonian.

    :param target: Target unitary on the product basis.
    :param reference_diagonal: Diagonal of H_ref in units of ħωx; usually H₀.
    """
    rotated = np.exp(1j * np.asarray(reference_diagonal) * duration)
    expected = np.asarray(target) @ initial.amplitudes
    overlap = np.vdot(expected, rotated * final.amplitudes)
    return float(min(1.0, abs(overlap) ** 2))
