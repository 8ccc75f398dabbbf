"""WebSocket fan-out and HTTP control surface.

Wire protocol: one UTF-8 JSON object per socket message, shaped
``{"type", "payload", "msg_id"}`` with type in {hello, frame, control,
config, ack, error, bye}. Clients open with a hello naming their role
(face_dhh, face_hearing, control); face roles hold at most one active
client each (a newer hello displaces the older, which gets a bye).
Every control message is answered by exactly one ack or error echoing
its msg_id. Server-originated messages (frame, config, bye) carry a
per-connection monotonic msg_id of their own.

All intake runs on the single event loop, so mutations are serialized
into the session's total order; fan-out reads immutable broadcast
snapshots and may parallelize per connection.
"""

import asyncio
import contextlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from ..core.frames import canonical_json
from ..errors import (
    CaptioncastError,
    Forbidden,
    InvalidState,
    MalformedEvent,
    NotFound,
    NothingToRetract,
    OutOfRange,
    UnknownField,
)
from ..core.events import EventKind, TranscriptEvent
from ..sources.external import AsrMessageMapper, ExternalAsrMessage
from .runtime import SessionRuntime

logger = logging.getLogger(__name__)

ROLES = ("face_dhh", "face_hearing", "control")
FACE_ROLES = ("face_dhh", "face_hearing")
TICK_SECONDS = 1 / 30

_ERROR_CODES = {
    NothingToRetract: "nothing_to_retract",
    NotFound: "not_found",
    InvalidState: "invalid_state",
    OutOfRange: "out_of_range",
    UnknownField: "unknown_field",
    Forbidden: "forbidden",
    MalformedEvent: "malformed_event",
}


def error_code(exc: CaptioncastError) -> str:
    return _ERROR_CODES.get(type(exc), "error")


@dataclass
class Connection:
    client_id: str
    role: str
    websocket: WebSocket
    connected_at: int
    last_sent_seq: int = 0
    _msg_counter: int = 0
    send_lock: asyncio.Lock = field(default_factory=asyncio.Lock)

    def next_msg_id(self) -> int:
        self._msg_counter += 1
        return self._msg_counter

    async def send(self, type_: str, payload: dict, msg_id: int | None = None) -> None:
        message = {
            "type": type_,
            "payload": payload,
            "msg_id": self.next_msg_id() if msg_id is None else msg_id,
        }
        async with self.send_lock:
            await self.websocket.send_text(canonical_json(message))


class Hub:
    """Connection registry: one client per face role, any number of
    control clients."""

    def __init__(self):
        self.connections: dict[str, Connection] = {}
        self.faces: dict[str, str] = {}  # role -> client_id
        self._next_client = 0

    def new_client_id(self) -> str:
        self._next_client += 1
        return f"c{self._next_client}"

    def register(self, conn: Connection) -> Connection | None:
        """Add a connection; returns the displaced one, if any."""
        displaced = None
        if conn.role in FACE_ROLES:
            old_id = self.faces.get(conn.role)
            if old_id is not None:
                displaced = self.connections.get(old_id)
            self.faces[conn.role] = conn.client_id
        self.connections[conn.client_id] = conn
        return displaced

    def drop(self, client_id: str) -> None:
        conn = self.connections.pop(client_id, None)
        if conn is not None and self.faces.get(conn.role) == client_id:
            del self.faces[conn.role]

    def face_connection(self, role: str) -> Connection | None:
        client_id = self.faces.get(role)
        return self.connections.get(client_id) if client_id else None

    def all_connections(self) -> list[Connection]:
        return list(self.connections.values())


class CaptionServer:
    """Couples one SessionRuntime to the hub and the tick loop."""

    def __init__(self, runtime: SessionRuntime):
        self.runtime = runtime
        self.hub = Hub()
        self.wake = asyncio.Event()
        self.mapper = AsrMessageMapper(runtime.session_id, runtime.clock)
        self._stopped = False

    # -- intake ---------------------------------------------------------

    def submit_event(self, event: TranscriptEvent) -> dict:
        try:
            delta = self.runtime.submit_event(event)
        except MalformedEvent as exc:
            logger.warning("dropped malformed event: %s", exc)
            return {"accepted": False, "reason": "malformed_event"}
        self.wake.set()
        return {"accepted": delta.changed, "reason": delta.reason.value}

    def handle_control(self, role: str, action: str, args: dict) -> dict:
        if role not in ROLES:
            raise Forbidden(f"unknown role {role!r}")
        if role == "face_dhh" and action != "config_patch":
            raise Forbidden("the dhh face may only change the caption design")
        if action == "retract_last":
            target = self.runtime.retract_last()
            result = {"retracted": target}
        elif action == "retract_id":
            target = str(args.get("utterance_id", ""))
            self.runtime.retract_id(target)
            result = {"retracted": target}
        elif action == "config_patch":
            config = self.runtime.patch_config(dict(args.get("patch", {})))
            result = {"config": config.to_dict()}
        elif action == "clear":
            self.runtime.clear()
            result = {"cleared": True}
        else:
            raise Forbidden(f"unknown action {action!r}")
        self.wake.set()
        return result

    # -- fan-out ----------------------------------------------------------

    async def flush(self) -> None:
        broadcast = self.runtime.latest
        if broadcast is None:
            return
        sends = []
        for role, payload in (("face_dhh", broadcast.dhh), ("face_hearing", broadcast.hearing)):
            conn = self.hub.face_connection(role)
            if conn is not None and conn.last_sent_seq < broadcast.seq:
                conn.last_sent_seq = broadcast.seq
                sends.append(self._send_frame(conn, payload))
        if sends:
            await asyncio.gather(*sends)

    async def _send_frame(self, conn: Connection, payload: dict) -> None:
        try:
            await conn.send("frame", payload)
        except Exception:
            # A failing client never takes the session down with it.
            logger.info("dropping unreachable client %s", conn.client_id)
            self.hub.drop(conn.client_id)
            with contextlib.suppress(Exception):
                await conn.websocket.close()

    async def broadcast_config(self) -> None:
        payload = self.runtime.config.to_dict()
        for conn in self.hub.all_connections():
            try:
                await conn.send("config", payload)
            except Exception:
                self.hub.drop(conn.client_id)

    async def run_ticks(self) -> None:
        """30 Hz while a reveal or expiry is pending, quiescent otherwise."""
        while not self._stopped:
            if self.runtime.overdue_deadline():
                self.runtime.prune_tick()
            await self.flush()
            if self.runtime.is_active():
                await asyncio.sleep(TICK_SECONDS)
            else:
                self.wake.clear()
                # Re-check after clearing: a mutation may have landed
                # between is_active() and here.
                if self.runtime.latest is not None and self._pending_sends():
                    continue
                try:
                    await asyncio.wait_for(self.wake.wait(), timeout=0.5)
                except asyncio.TimeoutError:
                    pass

    def _pending_sends(self) -> bool:
        broadcast = self.runtime.latest
        if broadcast is None:
            return False
        return any(
            conn.last_sent_seq < broadcast.seq
            for role in FACE_ROLES
            if (conn := self.hub.face_connection(role)) is not None
        )

    def stop(self) -> None:
        self._stopped = True
        self.wake.set()


async def _handle_hello(server: CaptionServer, websocket: WebSocket) -> Connection:
    raw = await websocket.receive_text()
    try:
        message = json.loads(raw)
    except json.JSONDecodeError:
        await websocket.send_text(
            canonical_json(
                {"type": "error", "payload": {"code": "bad_hello", "message": "invalid JSON"}, "msg_id": 0}
            )
        )
        await websocket.close()
        raise WebSocketDisconnect(code=1002)

    msg_id = message.get("msg_id", 0)
    payload = message.get("payload", {}) or {}
    role = payload.get("role")
    session_id = payload.get("session_id")
    runtime = server.runtime
    if message.get("type") != "hello" or role not in ROLES or (
        session_id is not None and session_id != runtime.session_id
    ):
        await websocket.send_text(
            canonical_json(
                {
                    "type": "error",
                    "payload": {"code": "bad_hello", "message": "unknown role or session"},
                    "msg_id": msg_id,
                }
            )
        )
        await websocket.close()
        raise WebSocketDisconnect(code=1002)

    conn = Connection(
        client_id=server.hub.new_client_id(),
        role=role,
        websocket=websocket,
        connected_at=runtime.clock.now_ms(),
    )
    displaced = server.hub.register(conn)
    if displaced is not None:
        with contextlib.suppress(Exception):
            await displaced.send("bye", {"reason": "displaced"})
            await displaced.websocket.close()
        server.hub.drop(displaced.client_id)

    await conn.send(
        "ack",
        {"client_id": conn.client_id, "role": role, "session_id": runtime.session_id},
        msg_id=msg_id,
    )
    await conn.send("config", runtime.config.to_dict())
    if role in FACE_ROLES:
        broadcast = runtime.ensure_broadcast()
        frame = broadcast.dhh if role == "face_dhh" else broadcast.hearing
        conn.last_sent_seq = broadcast.seq
        await conn.send("frame", frame)
    return conn


def create_app(
    runtime: SessionRuntime,
    ui_dir: str | Path | None = None,
    feeder=None,
) -> FastAPI:
    """Build the FastAPI app around one session.

    ``feeder`` is an optional coroutine function taking the
    CaptionServer; it runs for the lifetime of the app (demo scripts).
    """
    server = CaptionServer(runtime)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        tick_task = asyncio.create_task(server.run_ticks())
        feed_task = asyncio.create_task(feeder(server)) if feeder is not None else None
        yield
        server.stop()
        if feed_task is not None:
            feed_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await feed_task
        tick_task.cancel()
        with contextlib.suppress(asyncio.CancelledError):
            await tick_task
        runtime.close()

    app = FastAPI(lifespan=lifespan)
    app.state.server = server

    @app.websocket("/ws")
    async def websocket_endpoint(websocket: WebSocket):
        await websocket.accept()
        try:
            conn = await _handle_hello(server, websocket)
        except WebSocketDisconnect:
            return
        try:
            while True:
                raw = await websocket.receive_text()
                await _handle_client_message(server, conn, raw)
        except WebSocketDisconnect:
            pass
        finally:
            server.hub.drop(conn.client_id)

    async def _handle_client_message(server: CaptionServer, conn: Connection, raw: str):
        try:
            message = json.loads(raw)
        except json.JSONDecodeError:
            await conn.send("error", {"code": "bad_message", "message": "invalid JSON"}, msg_id=0)
            return
        msg_id = message.get("msg_id", 0)
        if message.get("type") != "control":
            await conn.send(
                "error",
                {"code": "bad_message", "message": f"unexpected type {message.get('type')!r}"},
                msg_id=msg_id,
            )
            return
        payload = message.get("payload", {}) or {}
        action = payload.get("action")
        args = payload.get("args", {}) or {}
        try:
            result = server.handle_control(conn.role, action, args)
        except CaptioncastError as exc:
            detail = {"code": error_code(exc), "message": str(exc)}
            if isinstance(exc, OutOfRange):
                detail["fields"] = exc.fields
            if isinstance(exc, UnknownField):
                detail["fields"] = exc.fields
            await conn.send("error", detail, msg_id=msg_id)
            return
        await conn.send("ack", result, msg_id=msg_id)
        if action == "config_patch":
            await server.broadcast_config()
        await server.flush()

    @app.get("/healthz")
    async def healthz():
        return {
            "status": "ok",
            "session_id": runtime.session_id,
            "clients": {
                "faces": dict(server.hub.faces),
                "total": len(server.hub.connections),
            },
            "intake_p99_ms": runtime.intake_p99_ms(),
            "animating": runtime.is_active(),
        }

    @app.get("/config")
    async def get_config():
        return runtime.config.to_dict()

    @app.put("/config")
    async def put_config(request: Request):
        try:
            patch = await request.json()
        except json.JSONDecodeError:
            return JSONResponse({"error": {"code": "bad_request", "message": "invalid JSON"}}, status_code=400)
        if not isinstance(patch, dict):
            return JSONResponse(
                {"error": {"code": "bad_request", "message": "config body must be an object"}},
                status_code=400,
            )
        try:
            config = runtime.patch_config(patch)
        except (OutOfRange, UnknownField) as exc:
            return JSONResponse(
                {"error": {"code": error_code(exc), "message": str(exc), "fields": exc.fields}},
                status_code=400,
            )
        server.wake.set()
        await server.broadcast_config()
        await server.flush()
        return config.to_dict()

    @app.post("/transcript")
    async def post_transcript(request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError:
            return JSONResponse({"error": {"code": "bad_request", "message": "invalid JSON"}}, status_code=400)
        event = _event_from_body(server, body)
        if event is None:
            if "result_id" in body:
                # Mapper drops post-final and empty-final messages.
                return JSONResponse({"accepted": False, "reason": "dropped"}, status_code=202)
            return JSONResponse(
                {"error": {"code": "bad_request", "message": "unrecognized transcript shape"}},
                status_code=400,
            )
        result = server.submit_event(event)
        await server.flush()
        return JSONResponse(result, status_code=202)

    @app.get("/session/log")
    async def session_log():
        if runtime.log is None:
            return JSONResponse(
                {"error": {"code": "not_found", "message": "session logging is disabled"}},
                status_code=404,
            )
        return FileResponse(runtime.log.path, media_type="application/jsonl")

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _event_from_body(server: CaptionServer, body: dict) -> TranscriptEvent | None:
    if not isinstance(body, dict):
        return None
    runtime = server.runtime
    if "result_id" in body:
        try:
            return server.mapper.map(ExternalAsrMessage.from_dict(body))
        except (KeyError, ValueError):
            return None
    try:
        return TranscriptEvent(
            session_id=body.get("session_id", runtime.session_id),
            utterance_id=str(body["utterance_id"]),
            seq=int(body["seq"]),
            kind=EventKind(body["kind"]),
            text=str(body["text"]),
            recv_ts=runtime.clock.now_ms(),
            source_ts=body.get("source_ts"),
            confidence=body.get("confidence"),
        )
    except (KeyError, ValueError, TypeError):
        return None
