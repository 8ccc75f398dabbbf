"""Run the real server and watch the wire protocol.

Boots the session service on a local port, connects a DHH face, a
hearing face, and a control client, feeds transcript events over
HTTP, retracts over the control socket, and prints every message each
display client receives.

    python demos/wire_protocol.py
"""

import asyncio
import json
import threading
import time

import httpx
import uvicorn
import websockets

from captioncast.clock import MonotonicClock
from captioncast.core.config import CaptionConfig
from captioncast.service.runtime import SessionRuntime
from captioncast.service.server import create_app

PORT = 8741
BASE = f"http://127.0.0.1:{PORT}"


def start_server():
    runtime = SessionRuntime("default", CaptionConfig(), MonotonicClock())
    app = create_app(runtime)
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=PORT, log_level="error"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    while not server.started:
        time.sleep(0.05)
    return server


async def face(role, transcript):
    async with websockets.connect(f"ws://127.0.0.1:{PORT}/ws") as ws:
        await ws.send(json.dumps({"type": "hello", "payload": {"role": role}, "msg_id": 1}))
        try:
            while True:
                msg = json.loads(await asyncio.wait_for(ws.recv(), timeout=2.5))
                if msg["type"] == "frame":
                    lines = [
                        "".join(l["graphemes"]) + (" [X]" if l["retracted"] else "")
                        for l in msg["payload"]["lines"]
                    ]
                    transcript.append(f"{role:<13} frame#{msg['msg_id']:<2} {lines}")
                else:
                    transcript.append(f"{role:<13} {msg['type']}")
        except asyncio.TimeoutError:
            pass


async def conversation():
    await asyncio.sleep(0.3)
    async with httpx.AsyncClient(base_url=BASE) as client:
        for seq, (kind, text) in enumerate(
            [("partial", "one moment"), ("partial", "one moment please"), ("final", "one moment please!")],
            start=1,
        ):
            await client.post(
                "/transcript",
                json={"utterance_id": "u1", "seq": seq, "kind": kind, "text": text},
            )
            await asyncio.sleep(0.25)

    async with websockets.connect(f"ws://127.0.0.1:{PORT}/ws") as ctl:
        await ctl.send(json.dumps({"type": "hello", "payload": {"role": "control"}, "msg_id": 1}))
        await ctl.recv(), await ctl.recv()  # ack, config
        await ctl.send(
            json.dumps({"type": "control", "payload": {"action": "retract_last", "args": {}}, "msg_id": 2})
        )
        ack = json.loads(await ctl.recv())
        print(f"control client: {ack['type']} for msg_id {ack['msg_id']} -> {ack['payload']}")


async def main():
    transcript: list[str] = []
    await asyncio.gather(
        face("face_dhh", transcript),
        face("face_hearing", transcript),
        conversation(),
    )
    print()
    for entry in transcript:
        print(entry)
    print("\nBoth faces received the same line content frame for frame;")
    print("the hearing face just carries mirrored=true and the scale.")


if __name__ == "__main__":
    start_server()
    asyncio.run(main())
