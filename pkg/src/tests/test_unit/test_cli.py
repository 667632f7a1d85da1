import json

import pytest

from cli.config import load_run_config
from cli.main import build_parser, main, overrides_from
from exceptions import ConfigurationError


def test_config_hash_ignores_location_and_workers(tmp_path):
    first = load_run_config(overrides={"gate": {"kind": "D", "magnitude": 3.0}, "output_dir": str(tmp_path)})
    second = load_run_config(overrides={"gate": {"kind": "D", "magnitude": 3.0}, "threads": 4})
    assert first.config_hash("gate") == second.config_hash("gate")
    assert first.config_hash("gate") != first.config_hash("sweep")
    changed = load_run_config(overrides={"gate": {"kind": "D", "magnitude": 2.0}})
    assert changed.config_hash("gate") != first.config_hash("gate")


def test_flags_override_the_run_document(tmp_path, settings):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({
        "physics": {"eps_x": 0.05, "u_prime": 0.5},
        "gate": {"kind": "S", "magnitude": 1.0, "lam": 0.2},
        "propagator": {"n_com": 30},
    }))
    args = build_parser().parse_args(["gate", "--config", str(path), "--magnitude", "0.5", "--u-prime", "0.4"])
    config = load_run_config(args.config, overrides_from(args))
    assert config.gate.magnitude == 0.5
    assert config.gate.lam == 0.2
    assert config.physics.u_prime == 0.4
    run_settings = config.settings(settings)
    assert run_settings.EPS_X == 0.05
    assert run_settings.N_COM == 30
    assert run_settings.N_COM_SQUEEZING == 30
    request = config.gate.to_request(u_prime=config.physics.u_prime)
    assert request.u_prime == 0.4


def test_invalid_documents_are_configuration_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        load_run_config(overrides={"gate": {"kind": "D", "magnitude": 1.0, "lam": 0.1, "duration_us": 7.1}})
    with pytest.raises(ConfigurationError):
        load_run_config(overrides={"unknown_section": {"value": 1}})
    with pytest.raises(ConfigurationError):
        load_run_config(str(tmp_path / "missing.json"))


def test_layout_command_writes_coefficients(tmp_path):
    """
    Three-beam layout report.

    Expected:
    - Exit code 0 with the coefficient table and the JSON report.
    - Provenance lines ahead of the CSV header.
    - Solved depths close to the shipped ones.
    """
    assert main(["layout", "--name", "three_beam", "--out", str(tmp_path), "--no-store"]) == 0
    csv_lines = (tmp_path / "layout" / "coefficients.csv").read_text().splitlines()
    assert csv_lines[0].startswith("# config_hash: ")
    assert csv_lines[3].startswith("order,")
    report = json.loads((tmp_path / "layout" / "report.json").read_text())
    assert report["command"] == "layout"
    assert report["payload"]["solved_depths_over_V0"] == pytest.approx([1.76, 2.17, 1.76], rel=0.03)


def test_spectrum_command_is_deterministic(tmp_path):
    argv = ["spectrum", "--u-max", "0.4", "--points", "3", "--no-store"]
    assert main(argv + ["--out", str(tmp_path / "first")]) == 0
    assert main(argv + ["--out", str(tmp_path / "second")]) == 0
    first = (tmp_path / "first" / "spectrum" / "spectrum.csv").read_text()
    second = (tmp_path / "second" / "spectrum" / "spectrum.csv").read_text()
    assert first == second
    assert len(first.splitlines()) == 3 + 1 + 3


def test_tomography_command_matches_the_direct_reference(tmp_path):
    argv = ["tomography", "--state", "coherent", "--alpha", "0.5", "0.0", "--extent", "1.0", "--spacing", "0.25",
            "--out", str(tmp_path), "--no-store"]
    assert main(argv) == 0
    report = json.loads((tmp_path / "tomography" / "report.json").read_text())
    assert report["payload"]["max_deviation_from_direct"] < 1e-10
    assert report["payload"]["chi_at_origin"] == pytest.approx([1.0, 0.0], abs=1e-10)
    assert {"chi_com.csv", "chi_rel.csv", "wigner.csv", "wigner.svg"} <= set(report["files"])


@pytest.mark.parametrize(
    "argv, exit_code",
    [
        (["sweep", "--kind", "D", "--magnitude", "1"], 1),
        (["gate", "--kind", "X", "--magnitude", "1", "--lam", "0.1"], 1),
        (["gate", "--magnitude", "1", "--lam", "0.1"], 1),
        (["gate", "--kind", "D", "--magnitude", "20", "--lam", "0.95"], 2),
        (["spectrum", "--method", "matrix", "--u-max", "0.4", "--points", "2"], 3),
    ],
)
def test_failures_map_to_exit_codes(tmp_path, argv, exit_code):
    assert main(argv + ["--out", str(tmp_path), "--no-store"]) == exit_code


def test_unconverged_matrix_spectrum_needs_an_explicit_opt_out(tmp_path):
    argv = ["spectrum", "--method", "matrix", "--u-max", "0.4", "--points", "2", "--no-convergence-check",
            "--out", str(tmp_path), "--no-store"]
    assert main(argv) == 0
    assert (tmp_path / "spectrum" / "spectrum.csv").exists()
