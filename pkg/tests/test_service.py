"""HTTP service behavior through the ASGI test client."""

import json

import pytest
from fastapi.testclient import TestClient

from pidgraph.service import create_app

from helpers import CONTROL_LOOP, STRAIGHT_LINE


@pytest.fixture
def client(tmp_path):
    app = create_app(str(tmp_path / "store"))
    with TestClient(app) as c:
        yield c


def _upload(client, content=STRAIGHT_LINE, name="plant.xml"):
    response = client.post(
        "/api/models",
        files={"file": (name, content.encode("utf-8"), "application/xml")},
    )
    assert response.status_code == 200, response.text
    return response.json()


def _scripted_spec(tmp_path, responses):
    path = tmp_path / "script.json"
    path.write_text(json.dumps({"responses": responses}), encoding="utf-8")
    return {"providerName": "scripted", "modelId": "canned", "endpoint": str(path)}


def _session(client, tmp_path, responses, **overrides):
    model_id = _upload(client)["model"]["modelId"]
    payload = {
        "model_id": model_id,
        "level": "high",
        "provider": _scripted_spec(tmp_path, responses),
    }
    payload.update(overrides)
    response = client.post("/api/sessions", json=payload)
    assert response.status_code == 200, response.text
    return response.json()["session"]["sessionId"]


def _sse_events(response):
    events = []
    for line in response.text.splitlines():
        if line.startswith("data: "):
            events.append(json.loads(line[len("data: "):]))
    return events


# ---------------------------------------------------------------------------
# models


def test_upload_returns_record_and_report(client):
    body = _upload(client)
    model = body["model"]
    assert model["nodes"]["complete"] >= model["nodes"]["high"]
    assert model["tokens"]["complete"] > 0
    assert body["report"]["nodesBefore"] == model["nodes"]["complete"]


def test_upload_rejects_oversize(tmp_path):
    app = create_app(str(tmp_path / "store"), max_upload_bytes=100)
    with TestClient(app) as client:
        response = client.post(
            "/api/models", files={"file": ("big.xml", b"x" * 200, "application/xml")}
        )
    assert response.status_code == 413


def test_upload_rejects_binary(client):
    response = client.post(
        "/api/models", files={"file": ("bad.xml", b"\xff\xfe\x01binary", "application/xml")}
    )
    assert response.status_code == 422


def test_upload_rejects_empty(client):
    response = client.post(
        "/api/models", files={"file": ("empty.xml", b"   ", "application/xml")}
    )
    assert response.status_code == 400


def test_upload_rejects_malformed_xml(client):
    response = client.post(
        "/api/models", files={"file": ("broken.xml", b"<PlantModel><oops", "application/xml")}
    )
    assert response.status_code == 422


def test_list_and_get_models(client):
    model_id = _upload(client)["model"]["modelId"]
    _upload(client, CONTROL_LOOP, "loop.xml")
    listing = client.get("/api/models").json()["models"]
    assert {m["modelId"] for m in listing} >= {model_id}
    assert client.get(f"/api/models/{model_id}").json()["modelId"] == model_id
    assert client.get("/api/models/zzzz").status_code == 404


def test_graph_endpoint_formats(client):
    model_id = _upload(client)["model"]["modelId"]
    graphml = client.get(f"/api/models/{model_id}/graph", params={"level": "complete"})
    assert graphml.status_code == 200
    assert "graphml" in graphml.headers["content-type"] or "xml" in graphml.headers["content-type"]
    assert graphml.text.lstrip().startswith("<")

    as_json = client.get(
        f"/api/models/{model_id}/graph", params={"level": "high", "format": "json"}
    )
    assert as_json.status_code == 200
    payload = json.loads(as_json.text)
    assert {"nodes", "edges"} <= set(payload)


def test_graph_endpoint_validation(client):
    model_id = _upload(client)["model"]["modelId"]
    assert client.get(f"/api/models/{model_id}/graph", params={"level": "medium"}).status_code == 400
    assert client.get(f"/api/models/{model_id}/graph", params={"format": "dot"}).status_code == 400
    assert client.get("/api/models/zzzz/graph").status_code == 404


def test_condensation_report_endpoint(client):
    model_id = _upload(client)["model"]["modelId"]
    report = client.get(f"/api/models/{model_id}/condensation-report").json()
    assert report["nodesAfter"] <= report["nodesBefore"]
    assert client.get("/api/models/zzzz/condensation-report").status_code == 404


# ---------------------------------------------------------------------------
# auth


def test_bearer_auth_guards_api(tmp_path):
    app = create_app(str(tmp_path / "store"), auth_token="sekrit")
    with TestClient(app) as client:
        assert client.get("/api/models").status_code == 401
        assert client.get(
            "/api/models", headers={"Authorization": "Bearer wrong"}
        ).status_code == 401
        assert client.get(
            "/api/models", headers={"Authorization": "Bearer sekrit"}
        ).status_code == 200


# ---------------------------------------------------------------------------
# sessions


def test_create_session_validation(client, tmp_path):
    spec = _scripted_spec(tmp_path, [{"text": "hi"}])
    missing = client.post("/api/sessions", json={
        "model_id": "zzzz", "level": "high", "provider": spec,
    })
    assert missing.status_code == 404
    model_id = _upload(client)["model"]["modelId"]
    bad_level = client.post("/api/sessions", json={
        "model_id": model_id, "level": "medium", "provider": spec,
    })
    assert bad_level.status_code == 400
    tiny_budget = client.post("/api/sessions", json={
        "model_id": model_id, "level": "high", "provider": spec, "token_budget": 5,
    })
    assert tiny_budget.status_code == 400


def test_get_session_and_404(client, tmp_path):
    session_id = _session(client, tmp_path, [{"text": "hi"}])
    body = client.get(f"/api/sessions/{session_id}").json()
    assert body["session"]["sessionId"] == session_id
    assert body["history"] == []
    assert client.get("/api/sessions/zzzz").status_code == 404


def test_message_streams_tokens_then_done(client, tmp_path):
    session_id = _session(client, tmp_path, [{"text": "T1 feeds P1.", "chunk_size": 4}])
    response = client.post(f"/api/sessions/{session_id}/messages", json={"question": "flow?"})
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("text/event-stream")
    events = _sse_events(response)
    assert events[-1] == {"type": "done"}
    tokens = [e["text"] for e in events if e["type"] == "token"]
    assert "".join(tokens) == "T1 feeds P1."
    assert tokens == ["T1 f", "eeds", " P1."]
    history = client.get(f"/api/sessions/{session_id}").json()["history"]
    assert [(m["role"], m["content"]) for m in history] == [
        ("user", "flow?"), ("assistant", "T1 feeds P1."),
    ]


def test_message_validation_errors(client, tmp_path):
    session_id = _session(client, tmp_path, [{"text": "hi"}])
    assert client.post("/api/sessions/zzzz/messages", json={"question": "q"}).status_code == 404
    assert client.post(
        f"/api/sessions/{session_id}/messages", json={"question": "   "}
    ).status_code == 400


def test_message_auth_error_maps_to_401(client, tmp_path):
    session_id = _session(client, tmp_path, [{"error": "auth"}])
    response = client.post(f"/api/sessions/{session_id}/messages", json={"question": "q"})
    assert response.status_code == 401


def test_message_provider_error_maps_to_502(client, tmp_path):
    session_id = _session(client, tmp_path, [{"error": "backend down"}])
    response = client.post(f"/api/sessions/{session_id}/messages", json={"question": "q"})
    assert response.status_code == 502


def test_second_question_while_streaming_is_409(client, tmp_path):
    # hold the session lock the way an in-flight stream does; a second
    # question must be turned away with 409, not block or corrupt state
    session_id = _session(client, tmp_path, [{"chunks": ["one ", "two ", "three"]}])
    chat = client.app.state.sessions[session_id]["chat"]
    assert chat._lock.acquire(blocking=False)
    try:
        second = client.post(f"/api/sessions/{session_id}/messages", json={"question": "second"})
        assert second.status_code == 409
    finally:
        chat._lock.release()
    # once the lock is released the session accepts questions again
    retry = client.post(f"/api/sessions/{session_id}/messages", json={"question": "again"})
    assert retry.status_code == 200


def test_mid_stream_failure_emits_error_and_keeps_history(client, tmp_path):
    # the provider is rebuilt per message, so the recovery entry is routed
    # by question match rather than script position
    session_id = _session(
        client, tmp_path,
        [{"chunks": ["partial ", "answer"], "fail_after": 1},
         {"match": "retry", "text": "recovered"}],
    )
    response = client.post(f"/api/sessions/{session_id}/messages", json={"question": "doomed"})
    events = _sse_events(response)
    assert events[0] == {"type": "token", "text": "partial "}
    assert events[-1]["type"] == "error"
    assert all(e["type"] != "done" for e in events)
    assert client.get(f"/api/sessions/{session_id}").json()["history"] == []
    # the session is usable after the failure
    follow_up = client.post(f"/api/sessions/{session_id}/messages", json={"question": "retry"})
    assert _sse_events(follow_up)[-1] == {"type": "done"}


def test_sessions_survive_restart(tmp_path):
    store_dir = str(tmp_path / "store")
    app = create_app(store_dir)
    with TestClient(app) as client:
        session_id = _session(client, tmp_path, [{"text": "hello"}])
        client.post(f"/api/sessions/{session_id}/messages", json={"question": "q"})

    fresh = create_app(store_dir)
    with TestClient(fresh) as client:
        body = client.get(f"/api/sessions/{session_id}")
        assert body.status_code == 200
        assert [m["content"] for m in body.json()["history"]] == ["q", "hello"]


# ---------------------------------------------------------------------------
# static UI


def test_static_dir_served_when_present(tmp_path):
    ui = tmp_path / "ui"
    ui.mkdir()
    (ui / "index.html").write_text("<h1>pidgraph</h1>", encoding="utf-8")
    app = create_app(str(tmp_path / "store"), static_dir=str(ui))
    with TestClient(app) as client:
        response = client.get("/")
        assert response.status_code == 200
        assert "pidgraph" in response.text
        # the API still answers alongside the UI mount
        assert client.get("/api/models").status_code == 200
