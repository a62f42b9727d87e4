import json
from datetime import datetime

import pytest
from fastapi.testclient import TestClient

from sealab.server import LabServer, ManualClock, ServerConfig
from sealab.server.api import create_app
from sealab.server.store import Store

MONDAY_8AM = "2026-08-10T08:00:00"

# short-sweep variants of the shipped experiments so API-level tests run in
# milliseconds; the acceptance suite uses the real catalog
FAST_EXPERIMENTS = [
    {
        "id": "sysid",
        "title": "System identification (fast test variant)",
        "plant": {"m_k": 80.0, "b_eff": 1400.0, "k_s": 350000.0, "beta": 50.0, "loop_delay": 0.002, "f_s": 1000.0},
        "chirp": {"u_a": 1.0, "u_b": 0.0, "omega_0": 2.0, "omega_1": 300.0, "t_0": 0.0, "t_f": 16.0},
        "noise": {"sigma_f": 0.1, "seed": 1000},
        "k_ss": 0.0468,
        "experiment_kind": "open_loop",
        "design_chain": False,
        "questions": [
            {"id": "sweep_top", "prompt": "Final chirp frequency (rad/s)?", "answer": 300.0, "tolerance_rel": 0.01, "units": "rad/s"}
        ],
    },
    {
        "id": "feedback",
        "title": "Feedback control (fast test variant)",
        "plant": {"m_k": 80.0, "b_eff": 1400.0, "k_s": 350000.0, "beta": 50.0, "loop_delay": 0.0005, "f_s": 4000.0},
        "chirp": {"u_a": 2.0, "u_b": 0.0, "omega_0": 2.0, "omega_1": 1300.0, "t_0": 0.0, "t_f": 24.0},
        "noise": {"sigma_f": 0.1, "seed": 2000},
        "k_ss": 0.202,
        "experiment_kind": "closed_loop",
        "design_chain": True,
        "phi_d": 45.0,
    },
]

PRELAB_ANSWERS = {
    "sysid": {
        "model_order": "second order",
        "natural_frequency": 66.1,
        "dc_force_gain": 50.0,
    },
    "feedback": {
        "margin_meaning": "the closed loop is unstable: the phase margin is -15 degrees",
        "alpha_for_thirty": 3.0,
        "peak_location": 10.0,
    },
}


@pytest.fixture
def lab_env(tmp_path):
    """(client, server, clock) over a fresh data dir with fast experiments."""
    store = Store(tmp_path)
    store.write_json("experiments.json", FAST_EXPERIMENTS)
    clock = ManualClock(MONDAY_8AM)
    server = LabServer(ServerConfig(data_dir=str(tmp_path)), clock)
    client = TestClient(create_app(server))
    return client, server, clock


def login(client, user_id="student1", password="sealab") -> dict:
    r = client.post("/login", json={"user_id": user_id, "password": password})
    assert r.status_code == 200, r.text
    return {"Authorization": "Bearer " + r.json()["token"]}


def complete_prelab(client, headers, experiment: str) -> None:
    answers = PRELAB_ANSWERS[experiment]
    for q in client.get(f"/prelab/{experiment}", headers=headers).json()["questions"]:
        r = client.post(
            f"/prelab/{experiment}",
            json={"question_id": q["id"], "answer": answers[q["id"]]},
            headers=headers,
        )
        assert r.json()["correct"], (q["id"], r.text)


def enter_lab(client, clock, headers, experiment: str, start="2026-08-10T10:00:00") -> dict:
    r = client.post("/reserve", json={"experiment": experiment, "start": start}, headers=headers)
    assert r.status_code == 200, r.text
    clock.set(datetime.fromisoformat(start).replace(minute=1))
    r = client.post(f"/lab/{experiment}/start", headers=headers)
    assert r.status_code == 200, r.text
    return r.json()


def run_and_wait(client, headers, experiment: str) -> str:
    r = client.post(f"/lab/{experiment}/event", json={"type": "start_run"}, headers=headers)
    assert r.status_code == 200, r.text
    with client.stream("GET", f"/lab/{experiment}/stream", headers=headers) as resp:
        for line in resp.iter_lines():
            doc = json.loads(line)
            if doc.get("done"):
                assert "archive_id" in doc, doc
                return doc["archive_id"]
    raise AssertionError("stream ended without a completion message")
