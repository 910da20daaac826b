"""The WebSocket wrapper around the session protocol."""

from fastapi.testclient import TestClient

from dexp.server import create_app


def test_health_endpoint():
    with TestClient(create_app()) as client:
        assert client.get("/health").json() == {"ok": True}


def test_protocol_round_trip_over_websocket():
    with TestClient(create_app()) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_json({"kind": "open"})
            opened = ws.receive_json()
            sid = opened["session"]
            assert "table" in opened["payload"]["roots"]

            ws.send_json({"kind": "edit", "session": sid, "generation": 1,
                          "payload": {"text": "data.take(2)"}})
            assert ws.receive_json()["payload"]["errors"] == []

            ws.send_json({"kind": "previews", "session": sid, "generation": 1})
            previews = ws.receive_json()["payload"]["previews"]
            assert previews[0]["length"] == 2


def test_static_mount_serves_editor_assets(tmp_path):
    (tmp_path / "index.html").write_text("<title>editor</title>")
    with TestClient(create_app(static_dir=tmp_path)) as client:
        body = client.get("/").text
        assert "editor" in body
