"""HTTP/websocket boundary for live human play.

    POST /sessions                  open a session (config overrides in body)
    GET  /sessions/{id}/log         download the episode log (JSONL)
    POST /sessions/{id}/ranking     submit a post-game agent ranking
    WS   /ws/{id}?token=...         controller/spectator connection

All messages carry a ``protocol`` field. The client only ever sends
``{"type": "ready"}`` and ``{"type": "input", "key": ...}``.
"""

from __future__ import annotations

import asyncio
import json
import queue
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, WebSocket, WebSocketDisconnect
from fastapi.responses import FileResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from ..errors import ConfigError, ValidationError
from ..harness.config import ExperimentConfig
from .session import PROTOCOL, SessionManager


def create_app(
    base_config: ExperimentConfig | None = None,
    *,
    capacity: int = 8,
    log_dir: str | Path = "session_logs",
    static_dir: str | Path | None = None,
) -> FastAPI:
    if base_config is None:
        base_config = ExperimentConfig(agents=["fsm", "human"], mode="realtime", runs=1)
    manager = SessionManager(base_config, capacity=capacity, log_dir=log_dir)
    app = FastAPI(title="coopkitchen live server")
    app.state.manager = manager

    @app.get("/healthz")
    def healthz():
        return {"ok": True, "protocol": PROTOCOL}

    @app.post("/sessions")
    def open_session(overrides: dict | None = None):
        try:
            session = manager.open_session(overrides or {})
        except ConfigError as exc:
            if "capacity" in str(exc):
                raise HTTPException(status_code=429, detail=str(exc), headers={"Retry-After": "30"})
            raise HTTPException(status_code=400, detail=str(exc))
        return {
            "protocol": PROTOCOL,
            "session_id": session.session_id,
            "token": session.token,
            "ws_path": f"/ws/{session.session_id}",
            "human_seat": session.human_seat,
        }

    @app.get("/sessions/{session_id}/log")
    def download_log(session_id: str):
        session = manager.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="no such session")
        if session.log_path is not None and session.log_path.exists():
            return FileResponse(session.log_path, media_type="application/jsonl")
        if session.episode_log is not None:
            import io

            buf = io.StringIO()
            session.episode_log.dump(buf)
            return PlainTextResponse(buf.getvalue(), media_type="application/jsonl")
        raise HTTPException(status_code=409, detail="episode still running")

    @app.post("/sessions/{session_id}/ranking")
    def submit_ranking(session_id: str, body: dict):
        session = manager.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="no such session")
        ordering = body.get("ordering")
        if not isinstance(ordering, list) or not ordering:
            raise HTTPException(status_code=400, detail="body needs an 'ordering' list")
        try:
            scores = session.submit_ranking([str(x) for x in ordering])
        except ValidationError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"protocol": PROTOCOL, "ok": True, "borda": scores}

    @app.websocket("/ws/{session_id}")
    async def websocket_endpoint(ws: WebSocket, session_id: str, token: str = Query(default="")):
        session = manager.get(session_id)
        if session is None:
            await ws.close(code=4404)
            return
        controller = token == session.token
        await ws.accept()
        try:
            client = session.attach(controller=controller)
        except ConfigError as exc:
            await ws.send_text(json.dumps({"protocol": PROTOCOL, "type": "error", "detail": str(exc)}))
            await ws.close(code=4409)
            return

        loop = asyncio.get_running_loop()

        async def pump_outbound():
            while True:
                try:
                    text = await loop.run_in_executor(None, client.queue.get, True, 0.5)
                except queue.Empty:
                    if session.ended.is_set() and client.queue.empty():
                        break
                    continue
                await ws.send_text(text)

        async def pump_inbound():
            while True:
                raw = await ws.receive_text()
                if controller:
                    session.handle_message(raw)

        outbound = asyncio.create_task(pump_outbound())
        inbound = asyncio.create_task(pump_inbound())
        try:
            done, pending = await asyncio.wait(
                {outbound, inbound}, return_when=asyncio.FIRST_COMPLETED
            )
            for task in pending:
                task.cancel()
        except WebSocketDisconnect:
            pass
        finally:
            session.detach(client)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="static")

    return app
