"""HTTP facade over the board store: JSON API under /v1 plus a server-sent
event stream per board.

Rule rejections ride back as 200 responses carrying the rejected verdict;
they are domain outcomes. Transport-level errors are reserved for malformed
input (400), unknown resources (404), precondition violations (422) and
revision conflicts (409). Actor identity is a trusted header in this version.
"""

from __future__ import annotations

import argparse
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from queue import Empty, SimpleQueue
from typing import Mapping

import yaml
from fastapi import Body, FastAPI, Header, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse, StreamingResponse

from .domain import RiskLevel
from .errors import (
    DomainError,
    NotFoundError,
    RevisionConflictError,
    RiskboardError,
    SchemaError,
)
from .knowledge import (
    load_default_knowledge_base,
    load_knowledge_base,
    recommend_controls,
    recommend_threats,
)
from .reporting import generate_report, render_report
from .board import board_to_doc
from .rules import ruleset_from_doc
from .storage import BoardStore

KEEPALIVE_SECONDS = 15.0


@dataclass
class ServiceConfig:
    data_dir: Path = field(default_factory=lambda: Path("riskboard-data"))
    host: str = "127.0.0.1"
    port: int = 8402
    kb_path: Path | None = None
    ui_dir: Path | None = None


def load_config(path: Path | str | None = None) -> ServiceConfig:
    """Config file (JSON or YAML) with environment overrides on top."""
    config = ServiceConfig()
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        doc = yaml.safe_load(text) or {}
        if not isinstance(doc, Mapping):
            raise SchemaError("config file must hold an object")
        if "data_dir" in doc:
            config.data_dir = Path(doc["data_dir"])
        if "host" in doc:
            config.host = str(doc["host"])
        if "port" in doc:
            config.port = int(doc["port"])
        if "kb_path" in doc and doc["kb_path"]:
            config.kb_path = Path(doc["kb_path"])
        if "ui_dir" in doc and doc["ui_dir"]:
            config.ui_dir = Path(doc["ui_dir"])
    env = os.environ
    if env.get("RISKBOARD_DATA_DIR"):
        config.data_dir = Path(env["RISKBOARD_DATA_DIR"])
    if env.get("RISKBOARD_HOST"):
        config.host = env["RISKBOARD_HOST"]
    if env.get("RISKBOARD_PORT"):
        config.port = int(env["RISKBOARD_PORT"])
    if env.get("RISKBOARD_KB"):
        config.kb_path = Path(env["RISKBOARD_KB"])
    if env.get("RISKBOARD_UI"):
        config.ui_dir = Path(env["RISKBOARD_UI"])
    return config


def _error_response(exc: Exception) -> JSONResponse:
    if isinstance(exc, RevisionConflictError):
        return JSONResponse(
            status_code=409,
            content={"error": str(exc), "current_revision": exc.current},
        )
    if isinstance(exc, SchemaError):
        return JSONResponse(status_code=400, content={"error": str(exc)})
    if isinstance(exc, NotFoundError):
        return JSONResponse(status_code=404, content={"error": str(exc)})
    if isinstance(exc, DomainError):
        return JSONResponse(status_code=422, content={"error": str(exc)})
    raise exc


def _sse_frame(doc: Mapping) -> str:
    return f"id: {doc['sequence']}\ndata: {json.dumps(doc, sort_keys=True)}\n\n"


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    kb = None
    if config.kb_path is not None:
        kb = load_knowledge_base(Path(config.kb_path).read_text(encoding="utf-8"))
    store = BoardStore(config.data_dir, kb=kb)

    app = FastAPI(title="riskboard", version="1")
    app.state.store = store
    app.state.config = config
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["ETag", "X-Revision"],
    )

    @app.exception_handler(RiskboardError)
    async def _on_riskboard_error(request: Request, exc: RiskboardError):
        return _error_response(exc)

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/v1/boards", status_code=201)
    def create_board(
        body: dict = Body(...),
        x_actor: str | None = Header(default=None),
    ):
        if not isinstance(body, dict):
            raise SchemaError("body must be a JSON object")
        rules = None
        if body.get("rules") is not None:
            rules = ruleset_from_doc(body["rules"])
        board_id, revision = store.create_board(
            model=body.get("model"),
            rules=rules,
            board_id=body.get("board_id"),
            actor=body.get("actor") or x_actor or "anonymous",
        )
        return {"board_id": board_id, "revision": revision}

    @app.get("/v1/boards")
    def list_boards():
        return {"boards": store.list_boards()}

    @app.get("/v1/boards/{board_id}")
    def get_board(board_id: str, response: Response):
        board = store.get_board(board_id)
        response.headers["ETag"] = f'"{board.revision}"'
        response.headers["X-Revision"] = str(board.revision)
        return board_to_doc(board)

    @app.post("/v1/boards/{board_id}/commands")
    def post_command(
        board_id: str,
        command: dict = Body(...),
        if_match: str | None = Header(default=None),
        x_actor: str | None = Header(default=None),
    ):
        command = dict(command)
        if if_match is not None:
            try:
                command["expected_revision"] = int(if_match.strip().strip('"'))
            except ValueError:
                raise SchemaError(f"If-Match must carry a revision, got {if_match!r}")
        if not command.get("actor"):
            command["actor"] = x_actor or "anonymous"
        return store.apply(board_id, command)

    @app.get("/v1/boards/{board_id}/report")
    def get_report(board_id: str, format: str = Query(default="json")):
        board = store.get_board(board_id)
        report = generate_report(board, kb=store.kb)
        if format == "json":
            return json.loads(render_report(report, "json"))
        if format in ("md", "markdown"):
            return PlainTextResponse(
                render_report(report, "md"), media_type="text/markdown"
            )
        raise SchemaError(f"unknown report format {format!r}")

    @app.get("/v1/boards/{board_id}/events")
    def stream_events(board_id: str, since: int = Query(default=0)):
        store.get_board(board_id)  # 404 before the stream starts

        def generate():
            q: SimpleQueue = store.subscribe(board_id)
            try:
                # Subscribe first, then replay; anything that raced in between
                # arrives on the queue and is deduplicated by sequence.
                last = since
                for doc in store.events_after(board_id, since):
                    yield _sse_frame(doc)
                    last = doc["sequence"]
                while True:
                    try:
                        doc = q.get(timeout=KEEPALIVE_SECONDS)
                    except Empty:
                        yield ": keep-alive\n\n"
                        continue
                    if doc["sequence"] <= last:
                        continue
                    yield _sse_frame(doc)
                    last = doc["sequence"]
            finally:
                store.unsubscribe(board_id, q)

        return StreamingResponse(
            generate(),
            media_type="text/event-stream",
            headers={"Cache-Control": "no-cache", "X-Accel-Buffering": "no"},
        )

    @app.get("/v1/knowledge/threats")
    def knowledge_threats(asset_type: str | None = Query(default=None)):
        if asset_type is None:
            threats = [store.kb.threats[t] for t in sorted(store.kb.threats)]
        else:
            threats = recommend_threats(store.kb, asset_type)
        return {"threats": [t.to_doc() for t in threats]}

    @app.get("/v1/knowledge/controls")
    def knowledge_controls(threat: str, level: str):
        try:
            parsed_level = RiskLevel(level)
        except ValueError:
            raise SchemaError(f"unknown risk level {level!r}")
        required, optional = recommend_controls(store.kb, threat, parsed_level)
        return {
            "required": [c.to_doc() for c in required],
            "optional": [c.to_doc() for c in optional],
        }

    @app.post("/v1/knowledge/extensions", status_code=201)
    def knowledge_extend(entry: dict = Body(...)):
        return store.extend_kb(entry)

    if config.ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app


def main(argv: list[str] | None = None) -> int:
    import uvicorn

    parser = argparse.ArgumentParser(
        prog="riskboard-service", description="Run the riskboard HTTP service"
    )
    parser.add_argument("--config", help="JSON or YAML config file")
    parser.add_argument("--data-dir", help="board storage directory")
    parser.add_argument("--host")
    parser.add_argument("--port", type=int)
    parser.add_argument("--kb", help="knowledge-base JSON file")
    parser.add_argument("--ui-dir", help="static directory to serve at /")
    args = parser.parse_args(argv)

    config = load_config(args.config)
    if args.data_dir:
        config.data_dir = Path(args.data_dir)
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    if args.kb:
        config.kb_path = Path(args.kb)
    if args.ui_dir:
        config.ui_dir = Path(args.ui_dir)

    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
