import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from tqdm import tqdm

from beamforge.coefficients import build_coeff_matrix
from beamforge.depths import base_depths_for
from beamforge.geometry import BeamGeometry, load_layout
from cli.artifacts import ResultRecord, heat_map, line_plot, write_csv, write_json
from cli.config import GateSection, RunConfig
from config.settings import Settings
from dynamics.basis import MotionalState
from exceptions import ConfigurationError
from gatecat.requests import GateKind, GateRequest, lambda_for, tau_from_seconds
from gatecat.runner import GateContext, coefficients_for, optimize_lambda, simulate_gate
from relmode.spectrum import diagonalize_relative, optimal_anharmonicity
from tomoscope.protocol import direct_grid, reconstruct, symmetric_axis
from tomoscope.states import ModePairState, cat_state, coherent_state, squeezed_state, vacuum_state
from tomoscope.wigner import wigner_from_char

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReproductionRow:
    kind: GateKind
    magnitude: float
    published_infidelity: float
    published_time_us: float
    lower: float
    upper: float


REPRODUCTION_ROWS = (
    ReproductionRow(GateKind.D, 3.0, 6.2e-7, 7.1, 0.0, 1e-5),
    ReproductionRow(GateKind.S, 1.0, 1.3e-5, 190.0, 0.0, 1e-4),
    ReproductionRow(GateKind.CD, 3.0, 1.7e-1, 5100.0, 0.06, 0.5),
    ReproductionRow(GateKind.CS, 1.0, 1.1e-4, 13000.0, 0.0, 1e-3),
)
TIME_TOLERANCE = 0.2
REPRODUCE_SPAN = 0.15
REPRODUCE_POINTS = 7


def _record(config: RunConfig, command: str) -> ResultRecord:
    return ResultRecord(config_hash=config.config_hash(command), command=command)


def _gate_section(config: RunConfig) -> GateSection:
    if config.gate is None:
        raise ConfigurationError("This command needs a 'gate' section (kind and magnitude).")
    return config.gate


def _run_request(request: GateRequest, config: RunConfig, settings: Settings, context: GateContext):
    """Optimize λ when it is free, then run the gate; returns the outcome and the λ curve."""
    curve = []
    if request.optimize:
        best, curve = optimize_lambda(request, settings, lambda_grid=config.sweep.lambda_grid,
                                      threads=config.threads, strict=config.strict)
        request = request.with_lambda(best)
    return request, simulate_gate(request, context), curve


def cmd_spectrum(config: RunConfig, settings: Settings, out_dir: Path) -> ResultRecord:
    section = config.spectrum
    if section.u_max < section.u_min:
        raise ConfigurationError("u_max must not be below u_min.")
    record = _record(config, "spectrum")
    rows = []
    for u_prime in tqdm(np.linspace(section.u_min, section.u_max, section.points), desc="spectrum"):
        spectrum = diagonalize_relative(float(u_prime), settings.N_REL, method=section.method,
                                        n_expansion=settings.N_EXPANSION,
                                        check_convergence=section.check_convergence)
        rows.append({
            "u_prime": float(u_prime),
            "E0": spectrum.energies[0],
            "E2": spectrum.energies[1],
            "E4": spectrum.energies[2],
            "omega_tilde": spectrum.omega_tilde,
            "omega_tilde_prime": spectrum.omega_tilde_prime,
            "anharmonicity": spectrum.anharmonicity,
        })
    if section.method == "matrix" and not section.check_convergence and section.u_max > 0:
        record.warnings.append("Truncated-matrix energies are not converged for u′ > 0.")
    frame = pd.DataFrame(rows)
    u_best, a_best = optimal_anharmonicity()
    record.payload = {
        "method": section.method,
        "points": len(rows),
        "optimal_u_prime": u_best,
        "max_anharmonicity": a_best,
    }
    write_csv(frame, record, out_dir, "spectrum.csv")
    line_plot(frame["u_prime"], {"A / ħωx": frame["anharmonicity"], "ω̃/ωx − 1.8": frame["omega_tilde"] - 1.8},
              record, out_dir, "spectrum.svg", "u′", "energy / ħωx")
    write_json(record, out_dir)
    return record


def cmd_gate(config: RunConfig, settings: Settings, out_dir: Path) -> ResultRecord:
    request = _gate_section(config).to_request(u_prime=config.physics.u_prime)
    context = GateContext(settings=settings, strict=config.strict, half_step_check=config.dt_check)
    request, outcome, curve = _run_request(request, config, settings, context)
    report = outcome.report
    record = _record(config, "gate")
    record.payload = {"request": request.to_dict(), "report": report.to_dict(), "time_us": report.duration * 1e6}
    record.diagnostics = report.diagnostics.to_dict()
    record.warnings = list(report.warnings)
    if curve:
        frame = pd.DataFrame(curve, columns=["lam", "fidelity"])
        write_csv(frame, record, out_dir, "lambda_curve.csv")
    write_json(record, out_dir)
    return record


def cmd_sweep(config: RunConfig, settings: Settings, out_dir: Path) -> ResultRecord:
    section = _gate_section(config)
    magnitudes = config.sweep.magnitudes
    if not magnitudes:
        raise ConfigurationError("The sweep needs at least one magnitude.")
    context = GateContext(settings=settings, strict=config.strict, half_step_check=config.dt_check)
    record = _record(config, "sweep")
    rows = []
    for magnitude in magnitudes:
        request = section.to_request(u_prime=config.physics.u_prime, magnitude=magnitude)
        request, outcome, _ = _run_request(request, config, settings, context)
        report = outcome.report
        rows.append({
            "magnitude": magnitude,
            "lam": report.lam,
            "tau": report.tau,
            "time_us": report.duration * 1e6,
            "infidelity": report.infidelity,
            "leakage": report.leakage,
            "norm_drift": report.diagnostics.norm_drift,
        })
        record.warnings.extend(report.warnings)
    frame = pd.DataFrame(rows)
    record.payload = {"kind": section.kind.value, "rows": rows}
    write_csv(frame, record, out_dir, "sweep.csv")
    line_plot(frame["magnitude"], {"1 − F": frame["infidelity"].clip(lower=1e-16)}, record, out_dir,
              "sweep_infidelity.svg", "gate magnitude", "infidelity", logy=True)
    line_plot(frame["magnitude"], {"λ*": frame["lam"]}, record, out_dir, "sweep_lambda.svg", "gate magnitude", "λ")
    write_json(record, out_dir)
    return record


def reproduction_grid(row: ReproductionRow, settings: Settings, u_prime: float) -> np.ndarray:
    """Narrow λ grid around the strength that reaches the magnitude in the reported gate time."""
    geometry = BeamGeometry.from_settings(settings)
    tau = tau_from_seconds(row.published_time_us * 1e-6, geometry.omega_x)
    centre = lambda_for(row.kind, tau, row.magnitude, geometry.eps_x, coefficients_for(u_prime, settings))
    return centre * np.linspace(1.0 - REPRODUCE_SPAN, 1.0 + REPRODUCE_SPAN, REPRODUCE_POINTS)


def cmd_reproduce(config: RunConfig, settings: Settings, out_dir: Path) -> ResultRecord:
    record = _record(config, "reproduce")
    context = GateContext(settings=settings, strict=config.strict, half_step_check=config.dt_check)
    rows = []
    for row in REPRODUCTION_ROWS:
        request = GateRequest(kind=row.kind, magnitude=row.magnitude)
        u_prime = context.u_prime_for(request)
        grid = reproduction_grid(row, settings, u_prime)
        best, _ = optimize_lambda(request, settings, lambda_grid=grid, threads=config.threads, strict=config.strict)
        report = simulate_gate(request.with_lambda(best), context).report
        time_us = report.duration * 1e6
        rows.append({
            "gate": f"{row.kind.value} |{row.magnitude:g}|",
            "published_infidelity": row.published_infidelity,
            "infidelity": report.infidelity,
            "infidelity_ok": row.lower <= report.infidelity <= row.upper,
            "published_time_us": row.published_time_us,
            "time_us": time_us,
            "time_ok": abs(time_us - row.published_time_us) <= TIME_TOLERANCE * row.published_time_us,
            "lam": best,
            "norm_drift": report.diagnostics.norm_drift,
        })
        record.warnings.extend(report.warnings)
    frame = pd.DataFrame(rows)
    print(frame.to_string(index=False))
    record.payload = {
        "rows": rows,
        "all_passed": bool(frame["infidelity_ok"].all() and frame["time_ok"].all()),
    }
    write_csv(frame, record, out_dir, "reproduce.csv")
    write_json(record, out_dir)
    return record


def tomography_state(config: RunConfig, settings: Settings) -> ModePairState:
    section = config.tomography
    alpha, xi = complex(*section.alpha), complex(*section.xi)
    if section.state == "vacuum":
        return vacuum_state(section.n_com)
    if section.state == "coherent":
        return coherent_state(alpha, section.n_com)
    if section.state == "cat":
        return cat_state(alpha, section.n_com)
    if section.state == "squeezed":
        return squeezed_state(xi, section.n_com)
    if section.gate is None:
        raise ConfigurationError("A post-gate tomography source needs 'tomography.gate'.")
    request = section.gate.to_request(u_prime=config.physics.u_prime)
    context = GateContext(settings=settings, strict=config.strict, n_com=section.n_com)
    _, outcome, _ = _run_request(request, config, settings, context)
    state: MotionalState = outcome.frame_state
    return ModePairState.from_motional(state, settings.N_TOMOGRAPHY)


def cmd_tomography(config: RunConfig, settings: Settings, out_dir: Path) -> ResultRecord:
    section = config.tomography
    record = _record(config, "tomography")
    state = tomography_state(config, settings)
    axis = symmetric_axis(section.extent or settings.TOMOGRAPHY_EXTENT,
                          section.spacing or settings.TOMOGRAPHY_SPACING)
    dimension = settings.N_TOMOGRAPHY
    grid = reconstruct(state, axis, dimension, threads=config.threads)
    direct = direct_grid(state, axis, dimension)
    max_alpha = math.hypot(*section.alpha)
    wigner = wigner_from_char(grid, max_alpha=max_alpha)
    centre = axis.size // 2
    position, peak = wigner.peak()
    record.payload = {
        "state": section.state,
        "grid_points": int(axis.size),
        "spacing": grid.spacing,
        "chi_at_origin": complex(grid.chi_com[centre, centre]),
        "max_deviation_from_direct": float(np.max(np.abs(grid.chi_com - direct))),
        "wigner_normalization": wigner.normalization,
        "wigner_minimum": wigner.minimum,
        "wigner_peak": peak,
        "wigner_peak_position": position,
    }
    record.warnings.extend(wigner.warnings)
    columns = ["beta_re", "beta_im", "value_re", "value_im"]
    write_csv(pd.DataFrame(list(grid.rows("com")), columns=columns), record, out_dir, "chi_com.csv")
    write_csv(pd.DataFrame(list(grid.rows("rel")), columns=columns), record, out_dir, "chi_rel.csv")
    wigner_frame = pd.DataFrame(list(wigner.rows()), columns=["x", "p", "value_re", "value_im"])
    write_csv(wigner_frame, record, out_dir, "wigner.csv")
    heat_map(axis, grid.chi_com.real, record, out_dir, "chi_com.svg", "Re β′", "Im β′", "Re χ_R")
    heat_map(wigner.axis, wigner.values, record, out_dir, "wigner.svg", "x", "p", "W")
    write_json(record, out_dir)
    return record


def cmd_layout(config: RunConfig, settings: Settings, out_dir: Path) -> ResultRecord:
    section = config.layout
    reference = section.path or section.name
    if reference is None:
        raise ConfigurationError("The layout command needs 'layout.name' or 'layout.path'.")
    geometry = BeamGeometry.from_settings(settings)
    layout = load_layout(reference, settings.LAYOUTS_DIR)
    matrix = build_coeff_matrix(layout, geometry)
    depths = base_depths_for(layout, geometry)
    record = _record(config, "layout")
    record.payload = {
        "layout": layout.to_dict(),
        "condition_number": matrix.condition_number,
        "solved_depths_over_V0": depths,
        "static_amplitudes": matrix.amplitudes(depths),
    }
    frame = pd.DataFrame(matrix.entries, index=[f"k={k}" for k in matrix.orders],
                         columns=[f"zeta={z:+.4f}" for z in matrix.positions]).reset_index(names="order")
    write_csv(frame, record, out_dir, "coefficients.csv")
    write_json(record, out_dir)
    return record


COMMANDS = {
    "spectrum": cmd_spectrum,
    "gate": cmd_gate,
    "sweep": cmd_sweep,
    "reproduce": cmd_reproduce,
    "tomography": cmd_tomography,
    "layout": cmd_layout,
}
