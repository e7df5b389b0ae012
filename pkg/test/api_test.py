import math

import pytest

PREFIX = "/api/v1/models"

THREE_ATOMS = {
    "type": "minid",
    "d": 2,
    "atoms": [{"w": 0.4, "p": [0.3, 1.0]}, {"w": 0.5, "p": [1.0, 0.6]}, {"w": 0.2, "p": [0.5, 0.5]}],
}


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


def test_survival_of_clayton(client):
    response = client.post(f"{PREFIX}/survival", json={"model": {"type": "clayton"}, "points": [[1.0, 1.0], [0.0, 0.0]]})
    assert response.status_code == 200
    body = response.json()
    assert body["model"] == "clayton"
    assert body["values"] == pytest.approx([1 / 3, 1.0])


def test_survival_outside_domain_is_422(client):
    response = client.post(f"{PREFIX}/survival", json={"model": THREE_ATOMS, "points": [[0.5, 2.0]]})
    assert response.status_code == 422
    assert response.json()["error"] == "DomainError"


def test_unknown_model_type_is_422(client):
    response = client.post(f"{PREFIX}/survival", json={"model": {"type": "gumbel"}, "points": [[1.0, 1.0]]})
    assert response.status_code == 422


def test_gamma_grid_masks_invgauss_pole(client):
    response = client.post(f"{PREFIX}/gamma-grid", json={"model": {"type": "invgauss"}, "resolution": 5})
    assert response.status_code == 200
    body = response.json()
    assert body["provenance"] == "closed-form"
    assert body["subset"] == "{1,2}"
    assert body["values"][0][0] is None
    assert body["masked"] == [[0, 0]]
    assert len(body["axis"]) == 5


def test_gamma_grid_for_minid_is_400(client):
    response = client.post(f"{PREFIX}/gamma-grid", json={"model": THREE_ATOMS})
    assert response.status_code == 400
    assert response.json()["error"] == "CapabilityError"


def test_factorize_returns_row_major_values(client):
    response = client.post(f"{PREFIX}/factorize", json={
        "model": {"type": "clayton"}, "subset": "1,2", "grid": {"lower": 0.0, "upper": 2.0, "nodes": 3},
    })
    assert response.status_code == 200
    body = response.json()
    assert body["shape"] == [3, 3]
    assert body["axes"][0] == [0.0, 1.0, 2.0]
    assert body["values"][4] == pytest.approx(math.log(4 / 3), abs=1e-10)


def test_factorize_with_bad_subset_is_400(client):
    response = client.post(f"{PREFIX}/factorize", json={
        "model": {"type": "clayton"}, "subset": "1,5", "grid": {"upper": 1.0, "nodes": 3},
    })
    assert response.status_code == 400
    assert response.json()["error"] == "StructuralError"


def test_sample_is_deterministic(client):
    payload = {"model": {"type": "clayton", "d": 3}, "n": 20, "seed": 4}
    first = client.post(f"{PREFIX}/sample", json=payload).json()
    second = client.post(f"{PREFIX}/sample", json=payload).json()
    assert first == second
    assert len(first["rows"]) == 20
    assert len(first["rows"][0]) == 3


def test_sample_of_minid_is_400(client):
    response = client.post(f"{PREFIX}/sample", json={"model": THREE_ATOMS, "n": 5})
    assert response.status_code == 400


def test_verify_minid_suite(client):
    response = client.get("/api/v1/verify/minid")
    assert response.status_code == 200
    body = response.json()
    assert body["passed"] is True
    assert {c["name"] for c in body["checks"]} >= {"three_atom_example", "identification"}


def test_verify_unknown_suite_is_422(client):
    assert client.get("/api/v1/verify/unknown").status_code == 422
