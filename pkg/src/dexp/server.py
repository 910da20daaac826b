"""WebSocket front door for the session engine.

One FastAPI app hosts one LiveService; editors connect to /ws and
exchange the protocol dicts as JSON.  Messages on a connection are
handled in arrival order, which is the per-session serialization the
engine expects.  Optionally serves a directory of static editor assets
at the root path.
"""

from __future__ import annotations

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .service import LiveService


def create_app(asset_dir=None, static_dir=None,
               preview_time_limit=None) -> FastAPI:
    app = FastAPI(title="dexp live service")
    service = LiveService(asset_dir=asset_dir,
                          preview_time_limit=preview_time_limit)
    app.state.service = service

    @app.websocket("/ws")
    async def websocket_endpoint(websocket: WebSocket):
        await websocket.accept()
        try:
            while True:
                msg = await websocket.receive_json()
                await websocket.send_json(service.handle(msg))
        except WebSocketDisconnect:
            pass

    @app.get("/health")
    def health():
        return {"ok": True}

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="editor")
    return app
