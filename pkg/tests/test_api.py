import pytest
from fastapi.testclient import TestClient

from mcsp.api import create_app


@pytest.fixture
def client():
    return TestClient(create_app())


SOURCE = "P : {u} = a -> b -> SKIP u"


def create(client, source=SOURCE, name="P"):
    resp = client.post("/sessions", json={"source": source, "name": name})
    assert resp.status_code == 200, resp.text
    return resp.json()


def test_create_and_get(client):
    payload = create(client)
    sid = payload["id"]
    assert payload["state"]["term"] == "P"
    got = client.get(f"/sessions/{sid}")
    assert got.status_code == 200
    assert got.json() == payload["state"]


def test_step_advances_term_and_trace(client):
    sid = create(client, "Q : Unit = a -> STOP", "Q")["id"]
    resp = client.post(f"/sessions/{sid}/step", json={"kind": "ext", "index": 0})
    assert resp.status_code == 200
    state = resp.json()
    assert state["term"] == "STOP"
    assert state["historyTrace"] == ["a"]


def test_full_run_to_termination(client):
    sid = create(client)["id"]
    client.post(f"/sessions/{sid}/step", json={"kind": "ext", "index": 0})
    client.post(f"/sessions/{sid}/step", json={"kind": "ext", "index": 0})
    state = client.post(f"/sessions/{sid}/step",
                        json={"kind": "tick", "index": 0}).json()
    assert state["status"] == {"kind": "terminated", "value": "u"}
    assert state["historyTrace"] == ["a", "b"]


def test_step_out_of_range_is_400(client):
    sid = create(client)["id"]
    resp = client.post(f"/sessions/{sid}/step", json={"kind": "ext", "index": 3})
    assert resp.status_code == 400


def test_unknown_session_is_404(client):
    assert client.get("/sessions/nope").status_code == 404
    resp = client.post("/sessions/nope/step", json={"kind": "ext", "index": 0})
    assert resp.status_code == 404


def test_unguarded_source_is_422_with_diagnostics(client):
    resp = client.post("/sessions",
                       json={"source": "X : Unit = X", "name": "X"})
    assert resp.status_code == 422
    diags = resp.json()["detail"]["diagnostics"]
    assert diags[0]["kind"] == "unguarded"


def test_syntax_error_is_422(client):
    resp = client.post("/sessions",
                       json={"source": "X : Unit = ->", "name": "X"})
    assert resp.status_code == 422
    assert resp.json()["detail"]["diagnostics"][0]["kind"] == "syntax"


def test_unknown_process_name_is_422(client):
    resp = client.post("/sessions", json={"source": SOURCE, "name": "Z"})
    assert resp.status_code == 422


def test_undo_and_delete(client):
    payload = create(client)
    sid = payload["id"]
    client.post(f"/sessions/{sid}/step", json={"kind": "ext", "index": 0})
    state = client.post(f"/sessions/{sid}/undo").json()
    assert state == payload["state"]
    assert client.delete(f"/sessions/{sid}").status_code == 204
    assert client.get(f"/sessions/{sid}").status_code == 404


def test_replay_determinism_over_the_api(client):
    steps = [{"kind": "ext", "index": 1}, {"kind": "tick", "index": 0}]
    source = "P : {u} + {w} = (a -> SKIP u) [] (b -> SKIP w)"
    finals = []
    for _ in range(2):
        sid = create(client, source, "P")["id"]
        state = None
        for s in steps:
            state = client.post(f"/sessions/{sid}/step", json=s).json()
        finals.append(state)
    assert finals[0] == finals[1]


def test_lts_endpoint(client):
    sid = create(client)["id"]
    resp = client.get(f"/sessions/{sid}/lts")
    assert resp.status_code == 200
    payload = resp.json()
    assert payload["complete"] is True
    assert len(payload["states"]) == 4  # P, b->SKIP u, SKIP u, sink
    assert any(s["kind"] == "terminated" for s in payload["states"])


def test_refusal_fields_mirror_state(client):
    source = "P : {u} + {w} = (a -> SKIP u) |~| (b -> SKIP w)"
    state = create(client, source, "P")["state"]
    assert state["stable"] is False
    assert state["initials"] == []


def test_lts_endpoint_rejects_bad_limits(client):
    sid = create(client)["id"]
    resp = client.get(f"/sessions/{sid}/lts", params={"max_states": 0})
    assert resp.status_code == 400
