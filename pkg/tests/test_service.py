"""Wire protocol and HTTP surface, over the in-process test client."""

import json

import pytest
from fastapi.testclient import TestClient

from captioncast.clock import MonotonicClock
from captioncast.core.config import CaptionConfig
from captioncast.service.runtime import SessionRuntime
from captioncast.service.server import create_app

# Long lingers stop time-driven expiry pushes from interleaving with
# the messages these tests count.
QUIET = CaptionConfig(linger_ms=60000, retract_linger_ms=10000)


@pytest.fixture
def client(tmp_path):
    runtime = SessionRuntime("default", QUIET, MonotonicClock(), log_path=tmp_path / "log.jsonl")
    app = create_app(runtime)
    with TestClient(app) as c:
        yield c


def hello(ws, role, msg_id=1, session_id=None):
    payload = {"role": role}
    if session_id is not None:
        payload["session_id"] = session_id
    ws.send_json({"type": "hello", "payload": payload, "msg_id": msg_id})
    ack = ws.receive_json()
    config = ws.receive_json()
    frame = None
    if role in ("face_dhh", "face_hearing"):
        frame = ws.receive_json()
    return ack, config, frame


def control(ws, action, args=None, msg_id=10):
    ws.send_json(
        {"type": "control", "payload": {"action": action, "args": args or {}}, "msg_id": msg_id}
    )
    return ws.receive_json()


def post_event(client, uid, seq, kind, text):
    r = client.post(
        "/transcript",
        json={"utterance_id": uid, "seq": seq, "kind": kind, "text": text},
    )
    assert r.status_code == 202, r.text
    return r.json()


def test_hello_registers_and_sends_snapshot(client):
    with client.websocket_connect("/ws") as ws:
        ack, config, frame = hello(ws, "face_dhh", msg_id=7)
        assert ack["type"] == "ack" and ack["msg_id"] == 7
        assert ack["payload"]["role"] == "face_dhh"
        assert config["type"] == "config"
        assert config["payload"]["line_width"] == QUIET.line_width
        assert frame["type"] == "frame"
        assert frame["payload"]["face"] == "dhh"
        assert frame["payload"]["lines"] == []


def test_control_client_gets_no_initial_frame(client):
    with client.websocket_connect("/ws") as ws:
        ack, config, frame = hello(ws, "control")
        assert frame is None
        assert config["payload"]["config_rev"] == 0


def test_bad_role_is_rejected(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "hello", "payload": {"role": "xyz"}, "msg_id": 1})
        err = ws.receive_json()
        assert err["type"] == "error"
        assert err["payload"]["code"] == "bad_hello"


def test_wrong_session_is_rejected(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_json(
            {"type": "hello", "payload": {"role": "control", "session_id": "other"}, "msg_id": 2}
        )
        err = ws.receive_json()
        assert err["payload"]["code"] == "bad_hello"


def test_matching_session_accepted(client):
    with client.websocket_connect("/ws") as ws:
        ack, _, _ = hello(ws, "control", session_id="default")
        assert ack["type"] == "ack"


def test_second_face_client_displaces_first(client):
    with client.websocket_connect("/ws") as ws1:
        hello(ws1, "face_dhh")
        with client.websocket_connect("/ws") as ws2:
            hello(ws2, "face_dhh")
            bye = ws1.receive_json()
            assert bye["type"] == "bye"
            assert bye["payload"]["reason"] == "displaced"


def test_event_pushes_frames_to_both_faces(client):
    with client.websocket_connect("/ws") as dhh, client.websocket_connect("/ws") as hearing:
        hello(dhh, "face_dhh")
        hello(hearing, "face_hearing")
        post_event(client, "u1", 1, "partial", "hello there")
        f_dhh = dhh.receive_json()["payload"]
        f_hear = hearing.receive_json()["payload"]
        assert f_dhh["face"] == "dhh" and not f_dhh["mirrored"] and f_dhh["scale"] == 1.0
        assert f_hear["face"] == "hearing" and f_hear["mirrored"]
        assert f_hear["scale"] == QUIET.mirror_scale
        # Identical content, differing face metadata.
        assert f_dhh["lines"] == f_hear["lines"]
        assert f_dhh["frame_ts"] == f_hear["frame_ts"]


def test_state_advances_with_no_clients(client):
    out = post_event(client, "u1", 1, "final", "nobody watching")
    assert out == {"accepted": True, "reason": "finalized"}
    runtime = client.app.state.server.runtime
    assert "u1" in runtime.state.utterances


def test_retract_last_acks_and_flags_caption(client):
    with client.websocket_connect("/ws") as dhh:
        hello(dhh, "face_dhh")
        post_event(client, "u1", 1, "final", "wrong words")
        first = dhh.receive_json()["payload"]
        assert not first["lines"][0]["retracted"]
        with client.websocket_connect("/ws") as ctl:
            hello(ctl, "control")
            ack = control(ctl, "retract_last", msg_id=42)
            assert ack["type"] == "ack" and ack["msg_id"] == 42
            assert ack["payload"]["retracted"] == "u1"
        flagged = dhh.receive_json()["payload"]
        assert flagged["lines"][0]["retracted"] is True


def test_retract_on_empty_session_errors(client):
    with client.websocket_connect("/ws") as ctl:
        hello(ctl, "control")
        err = control(ctl, "retract_last", msg_id=9)
        assert err["type"] == "error" and err["msg_id"] == 9
        assert err["payload"]["code"] == "nothing_to_retract"


def test_dhh_face_may_only_patch_config(client):
    post_event(client, "u1", 1, "final", "something")
    with client.websocket_connect("/ws") as dhh:
        hello(dhh, "face_dhh")
        err = control(dhh, "retract_last")
        assert err["type"] == "error" and err["payload"]["code"] == "forbidden"
        ack = control(dhh, "config_patch", {"patch": {"opacity": 0.7}}, msg_id=3)
        assert ack["type"] == "ack" and ack["msg_id"] == 3


def test_hearing_face_may_retract(client):
    post_event(client, "u1", 1, "final", "oops")
    with client.websocket_connect("/ws") as hearing:
        hello(hearing, "face_hearing")
        ack = control(hearing, "retract_last")
        assert ack["type"] == "ack"


def test_config_patch_broadcasts_config_and_scales_next_frame(client):
    with client.websocket_connect("/ws") as hearing:
        hello(hearing, "face_hearing")
        with client.websocket_connect("/ws") as ctl:
            hello(ctl, "control")
            ack = control(ctl, "config_patch", {"patch": {"mirror_scale": 0.3}})
            assert ack["type"] == "ack"
        cfg_msg = hearing.receive_json()
        assert cfg_msg["type"] == "config"
        assert cfg_msg["payload"]["mirror_scale"] == 0.3
        post_event(client, "u1", 1, "partial", "x")
        frame = hearing.receive_json()["payload"]
        assert frame["scale"] == 0.3


def test_bad_config_patch_lists_fields(client):
    with client.websocket_connect("/ws") as ctl:
        hello(ctl, "control")
        err = control(ctl, "config_patch", {"patch": {"opacity": 9}}, msg_id=77)
        assert err["type"] == "error" and err["msg_id"] == 77
        assert err["payload"]["code"] == "out_of_range"
        assert "opacity" in err["payload"]["fields"]


def test_per_connection_frame_ts_strictly_increases(client):
    with client.websocket_connect("/ws") as dhh:
        hello(dhh, "face_dhh")
        stamps = []
        for i in range(1, 6):
            post_event(client, "u1", i, "partial", "x" * i)
            stamps.append(dhh.receive_json()["payload"]["frame_ts"])
        assert all(a < b for a, b in zip(stamps, stamps[1:]))


def test_every_message_has_wire_shape(client):
    with client.websocket_connect("/ws") as dhh:
        msgs = list(hello(dhh, "face_dhh"))
        post_event(client, "u1", 1, "partial", "hi")
        msgs.append(dhh.receive_json())
        for m in msgs:
            assert set(m) == {"type", "payload", "msg_id"}
            assert m["type"] in ("hello", "frame", "control", "config", "ack", "error", "bye")


def test_unknown_message_type_errors(client):
    with client.websocket_connect("/ws") as ws:
        hello(ws, "control")
        ws.send_json({"type": "frame", "payload": {}, "msg_id": 5})
        err = ws.receive_json()
        assert err["type"] == "error" and err["msg_id"] == 5


def test_every_control_answered_exactly_once(client):
    post_event(client, "u1", 1, "final", "first caption")
    with client.websocket_connect("/ws") as ctl:
        hello(ctl, "control")
        # Mix of succeeding and failing commands, distinct ids.
        sent = {
            20: ("retract_last", {}),
            21: ("retract_last", {}),  # nothing left: error
            22: ("config_patch", {"patch": {"opacity": 5}}),  # out of range
            23: ("config_patch", {"patch": {"opacity": 0.5}}),
            24: ("clear", {}),
        }
        for msg_id, (action, args) in sent.items():
            ws_payload = {"action": action, "args": args}
            ctl.send_json({"type": "control", "payload": ws_payload, "msg_id": msg_id})
        replies = {}
        while len(replies) < len(sent):
            message = ctl.receive_json()
            if message["type"] in ("ack", "error"):
                assert message["msg_id"] not in replies, "duplicate reply"
                replies[message["msg_id"]] = message["type"]
        assert replies == {20: "ack", 21: "error", 22: "error", 23: "ack", 24: "ack"}


def test_server_originated_msg_ids_are_monotonic(client):
    with client.websocket_connect("/ws") as dhh:
        hello(dhh, "face_dhh")
        ids = []
        for i in range(1, 5):
            post_event(client, "u1", i, "partial", "x" * i)
            message = dhh.receive_json()
            assert message["type"] == "frame"
            ids.append(message["msg_id"])
        assert all(a < b for a, b in zip(ids, ids[1:]))


def test_http_config_get_put(client):
    r = client.get("/config")
    assert r.status_code == 200
    assert r.json()["line_width"] == QUIET.line_width
    r = client.put("/config", json={"line_width": 30})
    assert r.status_code == 200
    assert r.json()["line_width"] == 30
    assert r.json()["config_rev"] == 1
    r = client.put("/config", json={"line_width": 500})
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "out_of_range"
    assert client.get("/config").json()["line_width"] == 30


def test_http_put_full_config_roundtrip(client):
    full = client.get("/config").json()
    full["opacity"] = 0.25
    r = client.put("/config", json=full)
    assert r.status_code == 200
    assert r.json()["opacity"] == 0.25


def test_healthz(client):
    r = client.get("/healthz")
    assert r.status_code == 200
    body = r.json()
    assert body["status"] == "ok"
    assert body["session_id"] == "default"


def test_session_log_download(client):
    post_event(client, "u1", 1, "final", "logged line")
    r = client.get("/session/log")
    assert r.status_code == 200
    lines = [json.loads(l) for l in r.text.strip().splitlines()]
    assert lines[0]["kind"] == "config"
    assert any(rec["kind"] == "event" for rec in lines)
    assert any(rec["kind"] == "frame_digest" for rec in lines)


def test_post_transcript_external_asr_shape(client):
    r = client.post("/transcript", json={"result_id": "r1", "is_final": False, "transcript": "hel"})
    assert r.status_code == 202
    assert r.json()["accepted"] is True
    r = client.post("/transcript", json={"result_id": "r1", "is_final": True, "transcript": "hello"})
    assert r.status_code == 202
    runtime = client.app.state.server.runtime
    assert "".join(runtime.state.utterances["r1"].graphemes) == "hello"
    # post-final messages for the same result are dropped
    r = client.post("/transcript", json={"result_id": "r1", "is_final": False, "transcript": "x"})
    assert r.json()["accepted"] is False


def test_post_transcript_rejects_garbage(client):
    r = client.post("/transcript", json={"nope": 1})
    assert r.status_code == 400


def test_stale_event_reports_rejection(client):
    post_event(client, "u1", 2, "partial", "hello")
    out = post_event(client, "u1", 1, "partial", "stale")
    assert out == {"accepted": False, "reason": "rejected_stale"}
