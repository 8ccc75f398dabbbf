"""Operator CLI: serve a session, replay a script, inspect a log."""

import argparse
import asyncio
import json
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

from .clock import MonotonicClock
from .core.config import CaptionConfig, load_config_file
from .core.frames import canonical_json
from .replay import CommandEntry, ScriptEntry, load_session_script, replay_session
from .service.logstore import replay_log
from .service.runtime import SessionRuntime
from .sources.script import entry_to_event


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="captioncast")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the captioning session server")
    serve.add_argument("--port", type=int, default=8710)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--config", type=Path, help="JSON config file")
    serve.add_argument("--log-dir", type=Path, help="directory for the session log")
    serve.add_argument("--session-id", default="default")
    serve.add_argument("--script", type=Path, help="feed this session script into the live session")
    serve.add_argument("--speed", choices=["realtime", "fast"], default="realtime")
    serve.add_argument("--loop", action="store_true", help="repeat the feed script forever")
    serve.add_argument("--ui-dir", type=Path, help="serve a static UI from this directory at /ui")

    replay = sub.add_parser("replay", help="replay a script, frames to stdout as JSONL")
    replay.add_argument("--script", type=Path, required=True)
    replay.add_argument("--speed", choices=["realtime", "fast"], default="fast")
    replay.add_argument("--config", type=Path)
    replay.add_argument("--error-rate", type=float, default=0.0)
    replay.add_argument("--seed", type=int, default=0)

    inspect = sub.add_parser("inspect-log", help="summarize and verify a session log")
    inspect.add_argument("path", type=Path)

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    try:
        if args.command == "serve":
            return _serve(args)
        if args.command == "replay":
            return _replay(args)
        return _inspect_log(args)
    except BrokenPipeError:
        return 0


def _load_config(path: Path | None) -> CaptionConfig:
    return load_config_file(path) if path else CaptionConfig()


def _serve(args) -> int:
    import uvicorn

    from .service.server import create_app

    config = _load_config(args.config)
    log_path = None
    if args.log_dir:
        stamp = time.strftime("%Y%m%d-%H%M%S")
        log_path = Path(args.log_dir) / f"{args.session_id}-{stamp}.jsonl"
    runtime = SessionRuntime(args.session_id, config, MonotonicClock(), log_path=log_path)

    feeder = None
    if args.script:
        ops = load_session_script(args.script)
        feeder = _make_feeder(ops, args.speed, args.loop)

    ui_dir = args.ui_dir
    if ui_dir is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend"
        ui_dir = bundled if (bundled / "index.html").is_file() else None

    app = create_app(runtime, ui_dir=ui_dir, feeder=feeder)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _make_feeder(ops, speed: str, loop: bool):
    async def feed(server):
        iteration = 0
        while True:
            started = time.monotonic()
            suffix = f"~{iteration}" if iteration else ""
            for op in ops:
                if speed == "realtime":
                    delay = op.at_ms / 1000.0 - (time.monotonic() - started)
                    if delay > 0:
                        await asyncio.sleep(delay)
                if isinstance(op, ScriptEntry):
                    entry = replace(op, utterance_id=op.utterance_id + suffix)
                    server.submit_event(
                        replace(
                            entry_to_event(entry, server.runtime.session_id),
                            recv_ts=server.runtime.clock.now_ms(),
                        )
                    )
                else:
                    try:
                        server.handle_control("control", _command_action(op), _command_args(op))
                    except Exception:
                        pass
                await server.flush()
            if not loop:
                return
            iteration += 1
            await asyncio.sleep(2.0)

    return feed


def _command_action(op: CommandEntry) -> str:
    return op.cmd


def _command_args(op: CommandEntry) -> dict:
    if op.cmd == "retract_id":
        return {"utterance_id": op.utterance_id}
    if op.cmd == "config_patch":
        return {"patch": op.patch or {}}
    return {}


def _replay(args) -> int:
    ops = load_session_script(args.script)
    config = _load_config(args.config)

    if args.speed == "fast":
        emissions = replay_session(
            ops, config=config, error_rate=args.error_rate, seed=args.seed, strict_commands=False
        )
        for emission in emissions:
            sys.stdout.write(canonical_json(emission.to_dict()) + "\n")
        return 0

    # Realtime: walk the same deterministic replay but pace emissions.
    started = time.monotonic()

    def pace(emission):
        delay = emission.at / 1000.0 - (time.monotonic() - started)
        if delay > 0:
            time.sleep(delay)
        sys.stdout.write(canonical_json(emission.to_dict()) + "\n")
        sys.stdout.flush()

    replay_session(
        ops,
        config=config,
        error_rate=args.error_rate,
        seed=args.seed,
        strict_commands=False,
        on_emit=pace,
    )
    return 0


def _inspect_log(args) -> int:
    result = replay_log(args.path)
    counts: dict[str, int] = {}
    with open(args.path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            try:
                kind = json.loads(line).get("kind", "?")
            except json.JSONDecodeError:
                kind = "<unparseable>"
            counts[kind] = counts.get(kind, 0) + 1

    print(f"session:          {result.session_id}")
    print(f"records applied:  {result.records_applied}")
    for kind in sorted(counts):
        print(f"  {kind}: {counts[kind]}")
    print(f"utterances live:  {len(result.state.utterances)}")
    for u in result.state.utterances.values():
        text = "".join(u.graphemes)
        print(f"  [{u.status.value}] {u.utterance_id}: {text!r}")
    ok = result.digests_match
    print(f"frame digests:    {len(result.digests)} checked, {'all match' if ok else 'MISMATCH'}")
    if result.corrupt is not None:
        print(f"corrupt:          line {result.corrupt.line_no}: {result.corrupt.reason}")
        return 1
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
