"""Local HTTP service exposing the engine to the browser UI and scripts.

Endpoints (JSON in/out)::

    GET  /metrics                      known metric ids
    GET  /representations              known representation labels
    POST /sessions                     create + compute a session (201)
    GET  /sessions/{id}                full session document
    GET  /sessions/{id}/region         winning labels (+ robust mask via ?robust=)
    POST /sessions/{id}/reproduce      best reproduction at a point

Sessions are immutable once computed and live in memory; pass a persist
directory to also flush each session document to disk. CORS is open so the
local UI can talk to the service from any dev-server origin.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .engine import (
    DEFAULT_EXTENT_FRACTION,
    DEFAULT_RESOLUTION,
    SimilarityMap,
    best_reproduction,
    build_meshgrid,
    canonical_session_json,
    default_extent,
    evaluate_grid,
    robust_region,
    session_document,
)
from .errors import ComputationError, SamlfdError, ValidationError
from .metrics import METRIC_IDS
from .representations import REPRESENTATION_ORDER
from .shapes import BUNDLED_SHAPE_NAMES, bundled_shape
from .trajectory import Trajectory, preprocess
from .datasets import trajectory_from_dict


class SessionRequest(BaseModel):
    demo: dict | None = None
    bundled: str | None = None
    metric: str = "frechet"
    representations: list[str] = Field(default_factory=lambda: list(REPRESENTATION_ORDER))
    constraint: str = "initial"
    resolution: int = DEFAULT_RESOLUTION
    extent: float | list[float] | None = None
    center: list[float] | None = None
    robust: float | None = None
    name: str | None = None
    # Inline demos run through the default smoothing/resampling pipeline,
    # matching the CLI's file-loading behavior; bundled shapes already did.
    preprocess: bool = True


class ReproduceRequest(BaseModel):
    point: list[float]


@dataclass(frozen=True)
class SessionState:
    id: str
    status: str
    created: float
    demo: Trajectory
    smap: SimilarityMap
    document: dict


class SessionStore:
    """Concurrent map of immutable, fully computed sessions."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._sessions: dict[str, SessionState] = {}

    def put(self, state: SessionState) -> None:
        with self._lock:
            self._sessions[state.id] = state

    def get(self, session_id: str) -> SessionState:
        with self._lock:
            state = self._sessions.get(session_id)
        if state is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return state


def _resolve_demo(request: SessionRequest) -> tuple[Trajectory, str]:
    if (request.demo is None) == (request.bundled is None):
        raise ValidationError("provide exactly one of 'demo' (trajectory object) or 'bundled' (shape name)")
    if request.bundled is not None:
        if request.bundled not in BUNDLED_SHAPE_NAMES:
            raise ValidationError(
                f"unknown bundled shape {request.bundled!r}; available: {', '.join(BUNDLED_SHAPE_NAMES)}"
            )
        return bundled_shape(request.bundled), request.bundled
    demo = trajectory_from_dict(request.demo)
    if request.preprocess:
        demo = preprocess(demo)
    return demo, request.name or str(request.demo.get("name", "demonstration"))


def create_app(persist_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="samlfd", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore()
    persist_path = Path(persist_dir) if persist_dir else None
    if persist_path:
        persist_path.mkdir(parents=True, exist_ok=True)

    @app.exception_handler(SamlfdError)
    async def _samlfd_error(request, exc: SamlfdError):
        status = 500 if isinstance(exc, ComputationError) else 400
        return JSONResponse(status_code=status, content={"error": str(exc)})

    @app.get("/metrics")
    def list_metrics() -> dict:
        return {"metrics": list(METRIC_IDS)}

    @app.get("/representations")
    def list_representations() -> dict:
        return {"representations": list(REPRESENTATION_ORDER)}

    @app.post("/sessions", status_code=201)
    def create_session(request: SessionRequest) -> JSONResponse:
        demo, name = _resolve_demo(request)
        center = request.center if request.center is not None else (
            demo.initial if request.constraint == "initial" else demo.final
        )
        extent = request.extent if request.extent is not None else default_extent(demo, DEFAULT_EXTENT_FRACTION)
        grid = build_meshgrid(center, extent, request.resolution)
        smap = evaluate_grid(
            demo,
            grid,
            request.representations,
            request.metric,
            request.constraint,
        )
        document = session_document(demo, smap, demo_name=name, robust_threshold=request.robust)
        state = SessionState(
            id=uuid.uuid4().hex,
            status="ready",
            created=time.time(),
            demo=demo,
            smap=smap,
            document=document,
        )
        store.put(state)
        if persist_path:
            (persist_path / f"{state.id}.json").write_text(canonical_session_json(document))
        return JSONResponse(
            status_code=201,
            content={"id": state.id, "status": state.status, "created": state.created, "session": document},
        )

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        state = store.get(session_id)
        return {"id": state.id, "status": state.status, "created": state.created, "session": state.document}

    @app.get("/sessions/{session_id}/region")
    def get_region(session_id: str, robust: float | None = None) -> dict:
        state = store.get(session_id)
        body = {
            "labels": state.smap.best_label,
            "scores": state.smap.best_score.tolist(),
            "resolution": state.smap.grid.resolution,
            "representations": list(state.smap.labels),
        }
        if robust is not None:
            body["robust"] = {
                "threshold": robust,
                "mask": [bool(v) for v in robust_region(state.smap, robust)],
            }
        return body

    @app.post("/sessions/{session_id}/reproduce")
    def reproduce(session_id: str, request: ReproduceRequest) -> dict:
        state = store.get(session_id)
        result = best_reproduction(
            state.demo,
            request.point,
            state.smap.constraint_kind,
            state.smap.labels,
            state.smap.metric,
        )
        return result.to_dict()

    return app
