"""Session transports: a WebSocket server and a deterministic stdio loop.

Each WebSocket connection owns an isolated session. All mutation of a
session happens on one consumer task fed by an ordered queue (client
messages and 10 Hz tick timers), so the engine sees a strictly sequential
command stream. The stdio mode reads one JSON message per line and advances
simulated time only on explicit {"type": "tick", "n": k} lines, which keeps
headless runs reproducible. Both transports treat "tick" as a control
message handled at the transport layer, never forwarded to the session.
"""

from __future__ import annotations

import asyncio
import json
import sys
from typing import Optional, TextIO

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .config import Config
from .session import Phase, Session


def create_app(
    config: Config,
    *,
    dynamic_viz: bool = True,
    visual_programming: bool = True,
    max_sessions: int = 1,
    dt: float = 0.1,
    static_dir: Optional[str] = None,
    realtime: bool = True,
):
    app = FastAPI()
    app.state.active_sessions = 0

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):  # pragma: no cover - exercised via TestClient
        await ws.accept()
        if app.state.active_sessions >= max_sessions:
            await ws.send_text(
                json.dumps({"type": "protocol_error", "seq": 0, "tick": 0, "detail": "server full"})
            )
            await ws.close()
            return
        app.state.active_sessions += 1
        session = Session(
            config, dynamic_viz=dynamic_viz, visual_programming=visual_programming, dt=dt
        )
        queue: asyncio.Queue = asyncio.Queue()

        async def receiver():
            try:
                while True:
                    await queue.put(("msg", await ws.receive_text()))
            except WebSocketDisconnect:
                await queue.put(("close", None))

        async def ticker():
            while True:
                await asyncio.sleep(dt)
                await queue.put(("tick", 1))

        recv_task = asyncio.create_task(receiver())
        tick_task = asyncio.create_task(ticker()) if realtime else None
        try:
            await ws.send_text(json.dumps(session.snapshot_message()))
            while True:
                item, payload = await queue.get()
                if item == "close":
                    break
                if item == "tick":
                    outputs = session.tick()
                else:
                    outputs = _consume_line(session, payload)
                for msg in outputs:
                    await ws.send_text(json.dumps(msg))
        finally:
            recv_task.cancel()
            if tick_task is not None:
                tick_task.cancel()
            app.state.active_sessions -= 1

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app


def _consume_line(session: Session, line: str):
    try:
        msg = json.loads(line)
    except json.JSONDecodeError:
        return session.handle_message(line)  # yields a protocol_error
    if isinstance(msg, dict) and msg.get("type") == "tick":
        n = msg.get("n", 1)
        if not isinstance(n, int) or n < 1:
            n = 1
        outputs = []
        for _ in range(n):
            outputs.extend(session.tick())
            if session.phase != Phase.RUNNING:
                break
        return outputs
    return session.handle_message(msg)


def stdio_loop(
    config: Config,
    *,
    dynamic_viz: bool = True,
    visual_programming: bool = True,
    dt: float = 0.1,
    in_stream: Optional[TextIO] = None,
    out_stream: Optional[TextIO] = None,
) -> None:
    """Newline-delimited JSON session over stdin/stdout."""
    fin = in_stream or sys.stdin
    fout = out_stream or sys.stdout
    session = Session(config, dynamic_viz=dynamic_viz, visual_programming=visual_programming, dt=dt)
    fout.write(json.dumps(session.snapshot_message()) + "\n")
    fout.flush()
    for line in fin:
        line = line.strip()
        if not line:
            continue
        for msg in _consume_line(session, line):
            fout.write(json.dumps(msg) + "\n")
        fout.flush()
