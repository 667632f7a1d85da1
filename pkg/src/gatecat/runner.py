import cmath
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from tqdm import tqdm

from beamforge.depths import DepthSchedule, modulation_limit
from beamforge.geometry import BeamGeometry, load_layout
from config.settings import Settings
from dynamics.basis import MotionalState, ProductBasis, observables
from dynamics.assembly import assemble
from dynamics.propagator import PropagationDiagnostics, PropagatorConfig, propagate
from exceptions import ConfigurationError, InfeasibleDepthError
from gatecat.plans import WaveformPlan, plan_waveforms
from gatecat.requests import (
    CorrectionSettings,
    GateKind,
    GateRequest,
    corrected_rotation_duration,
    corrected_rotation_strength,
    correction_settings,
    duration_for,
    lambda_for,
    parameter_map,
    rotation_qubit_frame,
    tau_from_seconds,
)
from gatecat.targets import TargetUnitary, sigma_phi, target_unitary
from relmode.elements import QubitCoefficients, qubit_coefficients
from relmode.spectrum import RelativeSpectrum, diagonalize_relative

logger = logging.getLogger(__name__)

LAMBDA_CAP = 0.95
LIMIT_WINDOW_PERIODS = 20


@lru_cache(maxsize=16)
def cached_spectrum(u_prime: float, n_rel: int, n_expansion: int) -> RelativeSpectrum:
    return diagonalize_relative(u_prime, n_rel, n_expansion=n_expansion)


@dataclass(frozen=True)
class GateContext:
    """Everything a gate run needs besides the request itself."""

    settings: Settings
    strict: bool = False
    half_step_check: bool = False
    n_com: int | None = None

    @property
    def geometry(self) -> BeamGeometry:
        return BeamGeometry.from_settings(self.settings)

    def u_prime_for(self, request: GateRequest) -> float:
        if request.u_prime is not None:
            return request.u_prime
        if request.kind in (GateKind.D, GateKind.CD):
            return self.settings.U_PRIME_DISPLACEMENT
        return self.settings.U_PRIME_SQUEEZING

    def spectrum_for(self, request: GateRequest) -> RelativeSpectrum:
        return cached_spectrum(self.u_prime_for(request), self.settings.N_REL, self.settings.N_EXPANSION)

    def basis_for(self, request: GateRequest) -> ProductBasis:
        if self.n_com is not None:
            n_com = self.n_com
        elif request.kind == GateKind.S:
            n_com = self.settings.N_COM_SQUEEZING
        else:
            n_com = self.settings.N_COM
        return ProductBasis(n_com=n_com, n_rel=self.settings.N_REL_DYN)

    def propagator_config(self) -> PropagatorConfig:
        return PropagatorConfig.from_settings(self.settings, strict=self.strict,
                                              half_step_check=self.half_step_check)

    def layout_for(self, request: GateRequest):
        return load_layout(request.layout or request.kind.default_layout, self.settings.LAYOUTS_DIR)


@dataclass
class FidelityReport:
    kind: str
    fidelity: float
    infidelity: float
    leakage: float
    target_parameter: complex
    achieved_parameter: complex
    lam: float
    tau: float
    duration: float
    u_prime: float
    corrections: dict
    diagnostics: PropagationDiagnostics
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        values = asdict(self)
        for key in ("target_parameter", "achieved_parameter"):
            value = complex(getattr(self, key))
            values[key] = [value.real, value.imag]
        values["diagnostics"] = self.diagnostics.to_dict()
        return values


@dataclass(frozen=True)
class CompiledGate:
    """A gate resolved down to its depth schedule, before any propagation."""

    request: GateRequest
    spectrum: RelativeSpectrum
    coefficients: QubitCoefficients
    lam: float
    tau: float
    parameter: complex
    corrections: CorrectionSettings
    plan: WaveformPlan
    schedule: DepthSchedule


@dataclass
class GateOutcome:
    """A finished run: the report plus the final state rotated into the gate frame."""

    report: FidelityReport
    frame_state: MotionalState
    target: TargetUnitary
    initial: MotionalState


def reference_diagonal(h0_diagonal: np.ndarray, basis: ProductBasis, corrections: CorrectionSettings) -> np.ndarray:
    """H_ref = H₀ − Δ n̂ + (δ/2) σ̂z with σ̂z acting on the qubit levels only."""
    phonons = np.repeat(np.arange(basis.n_com, dtype=float), basis.n_rel)
    qubit = np.tile(np.concatenate([[1.0, -1.0], np.zeros(basis.n_rel - 2)]), basis.n_com)
    return h0_diagonal - corrections.delta_com * phonons + 0.5 * corrections.delta_qubit * qubit


def _conditional_com(state: MotionalState, phi: float, branch: int) -> np.ndarray:
    """COM amplitudes of the σ̂_φ eigenbranch ±1, unnormalized."""
    _, vectors = np.linalg.eigh(sigma_phi(phi))
    vector = vectors[:, 1] if branch > 0 else vectors[:, 0]
    return state.as_matrix()[:, :2] @ vector.conj()


def _moments(com: np.ndarray) -> tuple[float, complex, complex]:
    weight = float(np.vdot(com, com).real)
    if weight == 0:
        return 0.0, 0j, 0j
    n = np.arange(com.size)
    lowered = np.sqrt(n[1:]) * com[1:]
    twice = np.sqrt(n[2:] * n[1:-1]) * com[2:]
    mean_n = float(np.sum(n * np.abs(com) ** 2)) / weight
    return mean_n, complex(np.vdot(com[:-1], lowered)) / weight, complex(np.vdot(com[:-2], twice)) / weight


def achieved_parameter(kind: GateKind, frame_state: MotionalState, bare_state: MotionalState, phi: float,
                       start_alpha: complex) -> complex:
    """
    Gate parameter read off the final state.

    |α| = √⟨n̂⟩ with the phase of ⟨â⟩; |ξ| = asinh √⟨n̂⟩ with the phase of −⟨â²⟩; rotation angles from the
    phase acquired by ⟨â⟩ or from the |↓⟩ population. Controlled gates are read on the +1 branch of σ̂_φ.
    """
    if kind == GateKind.SR:
        down = observables(frame_state).population_down
        return complex(2.0 * math.asin(math.sqrt(min(1.0, max(0.0, down)))))
    if kind == GateKind.R:
        lowering = observables(bare_state).mean_lowering
        return complex(-cmath.phase(lowering / start_alpha)) if start_alpha else 0j
    if kind.is_controlled:
        mean_n, lowering, squared = _moments(_conditional_com(frame_state, phi, +1))
    else:
        summary = observables(frame_state)
        mean_n, lowering, squared = summary.mean_phonons, summary.mean_lowering, summary.mean_lowering_squared
    if kind == GateKind.CR:
        return complex(cmath.phase(lowering / start_alpha)) if start_alpha else 0j
    if kind in (GateKind.D, GateKind.CD):
        return math.sqrt(mean_n) * cmath.exp(1j * cmath.phase(lowering)) if lowering else complex(math.sqrt(mean_n))
    magnitude = math.asinh(math.sqrt(mean_n))
    return magnitude * cmath.exp(1j * cmath.phase(-squared)) if squared else complex(magnitude)


def initial_state(request: GateRequest, basis: ProductBasis) -> MotionalState:
    return MotionalState.coherent(basis, request.start_alpha)


def compile_gate(request: GateRequest, context: GateContext, check: bool = True) -> CompiledGate:
    """
    Resolve λ and τ, derive the frame corrections and build the depth schedule of one gate.

    A corrected R gate is timed on the second-order phonon rate λ/4 − λ²/(32ω̃), so its angle is exactly γ.

    :param check: Verify the depths stay non-negative over the gate.
    :raises InfeasibleDepthError: When `check` is set and a depth turns negative.
    """
    if request.optimize:
        raise ConfigurationError("Compiling a gate needs λ or the duration; use optimize_lambda otherwise.")
    geometry = context.geometry
    spectrum = context.spectrum_for(request)
    coefficients = qubit_coefficients(spectrum)
    kind = request.kind

    corrected = request.corrections and kind in (GateKind.R, GateKind.SR)
    corrected_rate = corrected and kind == GateKind.R and request.magnitude > 0
    if request.lam is not None:
        lam = request.lam
        tau = duration_for(kind, lam, request.magnitude, geometry.eps_x, coefficients) if request.magnitude else 0.0
    else:
        tau = tau_from_seconds(request.duration, geometry.omega_x)
        if corrected_rate and tau:
            lam = corrected_rotation_strength(request.magnitude, tau, spectrum.omega_tilde)
        else:
            lam = lambda_for(kind, tau, request.magnitude, geometry.eps_x, coefficients) if tau else 0.0

    corrections = CorrectionSettings()
    if corrected:
        corrections = correction_settings(kind, lam, spectrum, coefficients)
    if corrected_rate:
        if request.lam is not None:
            tau = corrected_rotation_duration(request.magnitude, corrections)
        parameter = complex(request.magnitude)
    else:
        parameter = parameter_map(kind, lam, tau, geometry.eps_x, coefficients, request.theta)
    layout = context.layout_for(request)
    plan = plan_waveforms(request, spectrum, geometry, layout, corrections)
    schedule = plan.schedule(geometry, lam, tau, check=check)
    return CompiledGate(request=request, spectrum=spectrum, coefficients=coefficients, lam=lam, tau=tau,
                        parameter=parameter, corrections=corrections, plan=plan, schedule=schedule)


def simulate_gate(request: GateRequest, context: GateContext, state: MotionalState | None = None) -> GateOutcome:
    """
    Compile, assemble and propagate one gate with λ resolved.

    :param state: Initial state; |↑⟩|α₀⟩ of the request when omitted.
    :raises InfeasibleDepthError: When a depth turns negative during the gate.
    """
    compiled = compile_gate(request, context)
    settings, geometry, kind = context.settings, context.geometry, request.kind
    spectrum, coefficients, corrections = compiled.spectrum, compiled.coefficients, compiled.corrections
    lam, tau, parameter, schedule = compiled.lam, compiled.tau, compiled.parameter, compiled.schedule

    basis = context.basis_for(request) if state is None else state.basis
    assembly = assemble(schedule, spectrum, geometry, basis, settings.K_SIM)
    initial = initial_state(request, basis) if state is None else state
    initial = MotionalState(initial.amplitudes, basis, 0.0, dict(initial.metadata))
    final, diagnostics = propagate(initial, assembly, tau, context.propagator_config())

    if kind == GateKind.SR:
        frame_corrections = corrections
    elif kind == GateKind.R and corrections.active:
        frame_corrections = rotation_qubit_frame(corrections, coefficients.c1)
    else:
        frame_corrections = CorrectionSettings()
    reference = reference_diagonal(assembly.h0_diagonal, basis, frame_corrections)
    target = target_unitary(kind, parameter, request.phi, basis, c1=coefficients.c1)
    frame_state = MotionalState(np.exp(1j * reference * tau) * final.amplitudes, basis, 0.0)
    bare_state = MotionalState(np.exp(1j * assembly.h0_diagonal * tau) * final.amplitudes, basis, 0.0)
    overlap = np.vdot(target.apply(initial.amplitudes), frame_state.amplitudes)
    fidelity = float(min(1.0, abs(overlap) ** 2))

    report = FidelityReport(
        kind=kind.value,
        fidelity=fidelity,
        infidelity=1.0 - fidelity,
        leakage=observables(final).leakage,
        target_parameter=parameter,
        achieved_parameter=achieved_parameter(kind, frame_state, bare_state, request.phi, request.start_alpha),
        lam=lam,
        tau=tau,
        duration=tau / geometry.omega_x,
        u_prime=spectrum.u_prime,
        corrections=corrections.to_dict(),
        diagnostics=diagnostics,
        warnings=list(diagnostics.warnings),
    )
    logger.info("%s gate: λ=%.5g τ=%.5g 1-F=%.3e leakage=%.3e", kind.value, lam, tau, report.infidelity,
                report.leakage)
    return GateOutcome(report=report, frame_state=frame_state, target=target, initial=initial)


def run_gate(request: GateRequest, settings: Settings, strict: bool = False, half_step_check: bool = False,
             threads: int = 1) -> FidelityReport:
    """
    Compile and run one gate; λ is optimized when neither λ nor the duration is given.

    :return: Fidelity report of the run (of the best grid point when optimizing).
    """
    context = GateContext(settings=settings, strict=strict, half_step_check=half_step_check)
    return simulate_gate(resolve_lambda(request, settings, threads=threads, strict=strict), context).report


def resolve_lambda(request: GateRequest, settings: Settings, lambda_grid=None, threads: int = 1,
                   strict: bool = False) -> GateRequest:
    """The request itself when λ or the duration is fixed, otherwise pinned to the optimal λ."""
    if not request.optimize:
        return request
    best, _ = optimize_lambda(request, settings, lambda_grid=lambda_grid, threads=threads, strict=strict)
    return request.with_lambda(best)


def feasible_lambda_limit(request: GateRequest, settings: Settings) -> float:
    """Largest λ keeping every depth non-negative for the gate's waveforms, capped below 1."""
    context = GateContext(settings=settings)
    spectrum = context.spectrum_for(request)
    geometry = context.geometry
    plan = plan_waveforms(request, spectrum, geometry, context.layout_for(request))
    slowest = min((abs(f) for f in plan.tones), default=1.0)
    tau = LIMIT_WINDOW_PERIODS * 2.0 * math.pi / max(slowest, 1e-3)
    schedule = plan.schedule(geometry, LAMBDA_CAP, tau, check=False)
    return min(LAMBDA_CAP, modulation_limit(schedule))


def default_lambda_grid(request: GateRequest, settings: Settings) -> np.ndarray:
    limit = feasible_lambda_limit(request, settings)
    if limit <= settings.LAMBDA_MIN:
        raise InfeasibleDepthError(f"No feasible λ above {settings.LAMBDA_MIN} for {request.kind.value}.")
    decades = math.log10(limit / settings.LAMBDA_MIN)
    points = max(2, int(math.ceil(decades * settings.LAMBDA_POINTS_PER_DECADE)) + 1)
    return np.logspace(math.log10(settings.LAMBDA_MIN), math.log10(limit), points)


def _grid_point(arguments) -> float | None:
    request, settings, strict, lam = arguments
    context = GateContext(settings=settings, strict=strict)
    try:
        return simulate_gate(request.with_lambda(lam), context).report.fidelity
    except InfeasibleDepthError:
        return None


def optimize_lambda(request: GateRequest, settings: Settings, lambda_grid=None, threads: int = 1,
                    strict: bool = False) -> tuple[float, list[tuple[float, float | None]]]:
    """
    Fidelity over a λ grid and its argmax.

    Points with negative depths are reported as None. Ties resolve to the smaller λ.

    :return: Best λ and the curve [(λ, fidelity or None)] ordered by λ.
    :raises InfeasibleDepthError: When no grid point is feasible.
    """
    if lambda_grid is None:
        lambda_grid = default_lambda_grid(request, settings)
    grid = sorted(float(lam) for lam in lambda_grid)
    if not grid:
        raise ConfigurationError("The λ grid is empty.")
    jobs = [(request, settings, strict, lam) for lam in grid]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            progress = tqdm(executor.map(_grid_point, jobs), total=len(jobs), desc=f"λ sweep {request.kind.value}")
            fidelities = list(progress)
    else:
        fidelities = [_grid_point(job) for job in tqdm(jobs, desc=f"λ sweep {request.kind.value}")]
    curve = list(zip(grid, fidelities))
    best_lam, best_fidelity = None, -1.0
    for lam, fidelity in curve:
        if fidelity is not None and fidelity > best_fidelity:
            best_lam, best_fidelity = lam, fidelity
    if best_lam is None:
        raise InfeasibleDepthError(f"Every λ on the grid makes a depth negative for {request.kind.value}.")
    logger.info("Optimal λ for %s |%.3g|: %.5g (1-F=%.3e)", request.kind.value, request.magnitude, best_lam,
                1.0 - best_fidelity)
    return best_lam, curve


def composite_fidelity(requests, settings: Settings, n_com: int | None = None) -> tuple[float, list[FidelityReport]]:
    """
    Run gates back to back, each in its own frame, and compare with the product of their targets.

    :return: Overlap fidelity with Û_n…Û_1|ψ₀⟩ and the per-gate reports.
    """
    requests = list(requests)
    if not requests:
        raise ConfigurationError("A composite needs at least one gate.")
    context = GateContext(settings=settings, n_com=n_com or settings.N_COM)
    u_primes = {context.u_prime_for(request) for request in requests}
    if len(u_primes) != 1:
        raise ConfigurationError("Gates of one composite must share the interaction strength.")
    state = initial_state(requests[0], context.basis_for(requests[0]))
    expected = state.amplitudes.copy()
    reports = []
    for request in requests:
        outcome = simulate_gate(request, context, state)
        expected = outcome.target.apply(expected)
        state = outcome.frame_state
        reports.append(outcome.report)
    fidelity = float(min(1.0, abs(np.vdot(expected, state.amplitudes)) ** 2))
    return fidelity, reports


def correction_comparison(kind, alphas, lam: float, magnitude: float, settings: Settings,
                          u_prime: float | None = None) -> list[dict]:
    """Infidelity of R or SR from |↑⟩|α⟩ with and without the frame corrections."""
    rows = []
    for alpha in alphas:
        n_com = max(settings.N_COM, int(math.ceil(abs(alpha) ** 2 + 8 * abs(alpha) + 16)))
        context = GateContext(settings=settings, n_com=n_com)
        row = {"alpha": float(abs(alpha))}
        for label, corrected in (("corrected", True), ("uncorrected", False)):
            request = GateRequest(kind=kind, magnitude=magnitude, lam=lam, u_prime=u_prime,
                                  corrections=corrected, initial_alpha=alpha)
            row[f"infidelity_{label}"] = simulate_gate(request, context).report.infidelity
        rows.append(row)
    return rows


def coefficients_for(u_prime: float, settings: Settings) -> QubitCoefficients:
    return qubit_coefficients(cached_spectrum(u_prime, settings.N_REL, settings.N_EXPANSION))
