import pytest

from database import RunStore


@pytest.mark.asyncio
async def test_get_runs_empty_database(client):
    """
    Test retrieving runs from an empty result store.

    Expected:
        - 404 response status code.
        - JSON response with a "No runs found." error.
    """
    response = await client.get("/api/v1/motional/runs/")

    assert response.status_code == 404
    assert response.json() == {"detail": "No runs found."}


@pytest.mark.asyncio
async def test_get_runs_with_pagination(client, stored_runs):
    """
    Test paging through stored runs, newest first.

    Expected:
        - 200 response status code.
        - Requested number of runs per page.
        - `prev_page` and `next_page` links consistent with the page position.
    """
    response = await client.get("/api/v1/motional/runs/?page=2&per_page=3")
    assert response.status_code == 200

    response_data = response.json()
    assert len(response_data["runs"]) == 3
    assert response_data["total_items"] == 7
    assert response_data["total_pages"] == 3
    assert response_data["prev_page"] == "/api/v1/motional/runs/?page=1&per_page=3"
    assert response_data["next_page"] == "/api/v1/motional/runs/?page=3&per_page=3"
    assert [run["config_hash"] for run in response_data["runs"]] == [f"{index:064x}" for index in (3, 2, 1)]


@pytest.mark.asyncio
@pytest.mark.parametrize("page, per_page", [(0, 10), (1, 0), (1, 21)])
async def test_invalid_page_and_per_page(client, page, per_page):
    """
    Test out-of-range pagination parameters.

    Expected:
        - 422 response status code from query validation.
    """
    response = await client.get(f"/api/v1/motional/runs/?page={page}&per_page={per_page}")
    assert response.status_code == 422


@pytest.mark.asyncio
async def test_get_run_by_hash(client, db_session):
    """
    Test fetching one stored run and re-saving it under the same hash.

    Expected:
        - 200 response status code with the latest payload.
        - A single record per configuration hash.
    """
    store = RunStore(db_session)
    config_hash = "ab" * 32
    await store.save(config_hash, "gate", "0.1.0", {"infidelity": 1e-3})
    await store.save(config_hash, "gate", "0.1.0", {"infidelity": 2e-3})

    response = await client.get(f"/api/v1/motional/runs/{config_hash}/")
    assert response.status_code == 200
    response_data = response.json()
    assert response_data["command"] == "gate"
    assert response_data["payload"] == {"infidelity": 2e-3}
    assert await store.count() == 1


@pytest.mark.asyncio
async def test_get_run_by_unknown_hash(client):
    response = await client.get(f"/api/v1/motional/runs/{'0' * 64}/")
    assert response.status_code == 404
    assert response.json() == {"detail": "Run with the given hash was not found."}


@pytest.mark.asyncio
async def test_spectrum_without_interaction(client):
    """
    Test the relative spectrum endpoint at u′ = 0.

    Expected:
        - Harmonic even ladder ½, 5/2, 9/2, ….
        - Qubit splitting 2ωx and no anharmonicity.
    """
    response = await client.post("/api/v1/motional/spectrum/", json={"u_prime": 0.0, "n_levels": 8})
    assert response.status_code == 200

    response_data = response.json()
    assert response_data["energies"] == pytest.approx([2.0 * n + 0.5 for n in range(8)])
    assert response_data["omega_tilde_over_omega_x"] == pytest.approx(2.0)
    assert response_data["anharmonicity"] == pytest.approx(0.0, abs=1e-12)
    assert response_data["coefficients"]["c1"] == pytest.approx(-1.0)


@pytest.mark.asyncio
async def test_spectrum_rejects_negative_interaction(client):
    response = await client.post("/api/v1/motional/spectrum/", json={"u_prime": -0.2})
    assert response.status_code == 422


@pytest.mark.asyncio
async def test_matrix_spectrum_reports_missing_convergence(client):
    """
    Test the truncated-matrix spectrum with an interaction.

    Expected:
        - 422 while the convergence check is on, since the contact term converges slowly in the basis size.
        - 200 and the matrix method echoed back once the check is switched off.
    """
    body = {"u_prime": 0.5, "n_levels": 8, "method": "matrix"}
    response = await client.post("/api/v1/motional/spectrum/", json=body)
    assert response.status_code == 422
    assert "converged" in response.json()["detail"]

    response = await client.post("/api/v1/motional/spectrum/", json={**body, "check_convergence": False})
    assert response.status_code == 200
    assert response.json()["method"] == "matrix"


@pytest.mark.asyncio
async def test_solve_three_beam_layout(client):
    """
    Test solving base depths for the symmetric three-beam trap.

    Expected:
        - 200 response status code.
        - Depths close to (1.76, 2.17, 1.76) V0 and a harmonic V2 = 2 V0.
    """
    body = {"positions": [-0.6775, 0.0, 0.6775], "symmetric": True, "name": "three_beam"}
    response = await client.post("/api/v1/motional/layouts/solve/", json=body)
    assert response.status_code == 200

    response_data = response.json()
    assert response_data["base_depths_over_V0"] == pytest.approx([1.76, 2.17, 1.76], rel=0.03)
    assert response_data["static_amplitudes"][1] == pytest.approx(2.0, abs=1e-9)


@pytest.mark.asyncio
async def test_solve_layout_with_broken_symmetry(client):
    body = {"positions": [-0.6, 0.0, 0.7], "symmetric": True}
    response = await client.post("/api/v1/motional/layouts/solve/", json=body)
    assert response.status_code == 422
    assert "symmetric" in response.json()["detail"]


@pytest.mark.asyncio
async def test_solve_single_beam_layout(client):
    body = {"positions": [0.0], "k_max": 1, "name": "single"}
    response = await client.post("/api/v1/motional/layouts/solve/", json=body)
    assert response.status_code == 422
    assert "at least two" in response.json()["detail"]


@pytest.mark.asyncio
async def test_plan_displacement_gate(client):
    """
    Test compiling a displacement without running it.

    Expected:
        - A 7.1 μs gate for |α| = 3 at λ = 0.1576.
        - One order-1 waveform at the trap frequency on the five-beam layout.
        - Depths stay positive with room left before the modulation limit.
    """
    body = {"kind": "D", "magnitude": 3.0, "lam": 0.1576}
    response = await client.post("/api/v1/motional/gates/plan/", json=body)
    assert response.status_code == 200

    response_data = response.json()
    assert response_data["time_us"] == pytest.approx(7.1, rel=0.01)
    assert abs(complex(*response_data["parameter"])) == pytest.approx(3.0)
    waveforms = response_data["plan"]["waveforms"]
    assert [waveform["order"] for waveform in waveforms] == [1]
    assert waveforms[0]["tones"][0]["frequency"] == pytest.approx(1.0)
    assert response_data["plan"]["layout"]["name"] == "five_beam"
    assert response_data["min_depth_over_V0"] > 0
    assert response_data["modulation_limit"] > 0.1576


@pytest.mark.asyncio
@pytest.mark.parametrize("body", [
    {"kind": "X", "magnitude": 1.0, "lam": 0.1},
    {"kind": "D", "magnitude": 1.0, "lam": 1.5},
    {"kind": "D", "magnitude": 1.0, "lam": 0.1, "layout": "three_beam"},
])
async def test_plan_rejects_invalid_gates(client, body):
    response = await client.post("/api/v1/motional/gates/plan/", json=body)
    assert response.status_code == 422
