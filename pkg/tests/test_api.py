import pytest
from fastapi.testclient import TestClient

from api.main import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def _short_run(**extra):
    body = {
        "schedule": {"kind": "piecewise_constant", "steps": [[0.0, 7.0]]},
        "duration": 1.0,
        "dt": 0.1,
        "initial_ph": 7.0,
    }
    body.update(extra)
    return body


def test_root_and_health(client):
    assert client.get("/").json()["docs"] == "/docs"
    health = client.get("/health").json()
    assert health["status"] == "healthy"
    assert health["neutral_ph"] == pytest.approx(7.0, abs=1e-6)


def test_ph_endpoint(client):
    response = client.get("/api/chemistry/ph", params={"alpha": 0.0, "beta": 0.01})
    assert response.status_code == 200
    assert response.json()["ph"] == pytest.approx(12.0, abs=1e-3)


def test_ph_rejects_negative_invariant(client):
    assert client.get("/api/chemistry/ph", params={"alpha": -1.0, "beta": 0.0}).status_code == 422


def test_titrate(client):
    response = client.post("/api/chemistry/titrate", json={"alpha": 0.026, "beta_max": 0.1, "steps": 11})
    assert response.status_code == 200
    body = response.json()
    assert len(body["beta"]) == len(body["ph"]) == 11
    assert body["ph"] == sorted(body["ph"])


def test_ziegler_nichols(client):
    response = client.post("/api/tuning/ziegler-nichols", json={"ultimate": {"g": 18.0, "p": 33.0}})
    assert response.status_code == 200
    gains = response.json()["gains"]
    assert gains["kp"] == pytest.approx(10.8)
    assert gains["kd"] == pytest.approx(44.55)


def test_ultimate_without_dead_time_is_422(client):
    body = {"flow_loop": {"gain": 1.0, "time_constant": 10.0, "dead_time": 0.0}}
    assert client.post("/api/tuning/ultimate", json=body).status_code == 422


def test_presets(client):
    body = client.get("/api/experiments/presets/exp1").json()
    assert body["schedule"]["kind"] == "piecewise_constant"
    assert body["duration"] == 900.0
    assert client.get("/api/experiments/presets/exp2").json()["schedule"]["kind"] == "square_wave"
    assert client.get("/api/experiments/presets/exp9").status_code == 404


def test_run(client):
    response = client.post("/api/experiments/run", json=_short_run())
    assert response.status_code == 200
    body = response.json()
    assert body["rows"] == 10
    assert len(body["trace"]["ph"]) == 10
    assert body["metrics"]["rmse_ph"] < 0.05


def test_run_rejects_unknown_field(client):
    assert client.post("/api/experiments/run", json=_short_run(colour="blue")).status_code == 422


def test_run_rejects_unreachable_initial_ph(client):
    body = _short_run(initial_ph=13.9)
    body["schedule"]["steps"] = [[0.0, 13.9]]
    assert client.post("/api/experiments/run", json=body).status_code == 422
