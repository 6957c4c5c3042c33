"""HTTP service exposing the job layer.

Semantics at the boundary:
  * malformed request (shape, types, unknown fields) -> 400
  * well-formed request hitting a domain error       -> 422 {"error": code}
  * unknown map/slice handle                         -> 404
  * too many computations already in flight          -> 503

Tiles and fiber renders are served as PNG with a JSON stats header; all
results are memoized in the artifact cache, so identical concurrent
requests compute once.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response

from pydantic import ValidationError

from .. import __version__
from ..cache import ArtifactCache, canonical_json, content_hash
from ..errors import TorusDynError
from ..render import CLASS_PALETTE
from ..jobs import (
    ClassifyJob,
    JuliaFiberJob,
    ParamSliceJob,
    SliceModel,
    SurgeryJob,
    run_cached,
)
from .models import MetaResponse, SliceRegistered, alpha_preset_values

TILE_SIZE = 256
DEFAULT_MAX_INFLIGHT = 8

_ENDPOINTS = [
    "GET /api/meta",
    "POST /api/slice",
    "GET /api/param-tile",
    "POST /api/classify",
    "GET /api/julia-fiber",
    "POST /api/surgery",
]


class ServiceBusy(Exception):
    pass


class UnknownHandle(Exception):
    def __init__(self, kind: str, handle: str):
        self.kind = kind
        self.handle = handle
        super().__init__(f"unknown {kind} {handle!r}")


class Registry:
    """Content-addressed store for slice and map descriptors."""

    def __init__(self, root: Path):
        self.root = root
        root.mkdir(parents=True, exist_ok=True)
        self._mem: dict[str, dict] = {}
        self._lock = threading.Lock()

    def put(self, payload: dict) -> str:
        handle = content_hash(payload)
        with self._lock:
            if handle in self._mem:
                return handle
            path = self.root / f"{handle}.json"
            if not path.is_file():
                tmp = path.with_suffix(".tmp")
                tmp.write_text(canonical_json(payload))
                os.replace(tmp, path)
            self._mem[handle] = payload
        return handle

    def get(self, handle: str, kind: str) -> dict:
        with self._lock:
            if handle in self._mem:
                return self._mem[handle]
        path = self.root / f"{handle}.json"
        if not path.is_file():
            raise UnknownHandle(kind, handle)
        payload = json.loads(path.read_text())
        with self._lock:
            self._mem[handle] = payload
        return payload


def _tile_window(rect, x: int, y: int, zoom: int):
    s0, s1, t0, t1 = rect
    n = 1 << zoom
    if not (0 <= x < n and 0 <= y < n):
        raise RequestValidationError(
            [{"loc": ("query",), "msg": f"tile ({x},{y}) outside zoom {zoom} grid"}]
        )
    ds = (s1 - s0) / n
    dt = (t1 - t0) / n
    # row y == 0 is the top band of the rect
    return (s0 + x * ds, s0 + (x + 1) * ds, t1 - (y + 1) * dt, t1 - y * dt)


def create_app(
    cache_root: str | None = None,
    max_inflight: int = DEFAULT_MAX_INFLIGHT,
    static_dir: str | None = None,
) -> FastAPI:
    cache = ArtifactCache(cache_root)
    slices = Registry(cache.root / "registry" / "slices")
    maps = Registry(cache.root / "registry" / "maps")
    gate = threading.BoundedSemaphore(max_inflight)

    app = FastAPI(title="torusdyn", version=__version__, docs_url="/api/docs")

    def compute(cfg):
        if not gate.acquire(blocking=False):
            raise ServiceBusy
        try:
            return run_cached(cache, cfg)
        finally:
            gate.release()

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"error": "bad-request", "message": str(exc.errors())}
        )

    @app.exception_handler(ValidationError)
    async def _invalid_params(request: Request, exc: ValidationError):
        return JSONResponse(
            status_code=400, content={"error": "bad-request", "message": str(exc.errors())}
        )

    @app.exception_handler(TorusDynError)
    async def _domain_error(request: Request, exc: TorusDynError):
        return JSONResponse(status_code=422, content={"error": exc.code, "message": str(exc)})

    @app.exception_handler(UnknownHandle)
    async def _unknown(request: Request, exc: UnknownHandle):
        return JSONResponse(
            status_code=404, content={"error": f"unknown-{exc.kind}", "message": str(exc)}
        )

    @app.exception_handler(ServiceBusy)
    async def _busy(request: Request, exc: ServiceBusy):
        return JSONResponse(
            status_code=503,
            content={"error": "busy", "message": "computation queue is full; retry shortly"},
        )

    @app.get("/api/meta", response_model=MetaResponse)
    def meta():
        return MetaResponse(
            name="torusdyn",
            version=__version__,
            alpha_presets=alpha_preset_values(),
            palette=[tuple(c) for c in CLASS_PALETTE],
            tile_size=TILE_SIZE,
            endpoints=list(_ENDPOINTS),
        )

    @app.post("/api/slice", response_model=SliceRegistered)
    def register_slice(body: SliceModel):
        body.to_spec()  # reject descriptors that do not parse
        handle = slices.put(body.model_dump(mode="json"))
        return SliceRegistered(slice=handle, rect=body.rect)

    @app.get("/api/param-tile")
    def param_tile(
        slice: str = Query(min_length=8),
        x: int = Query(ge=0),
        y: int = Query(ge=0),
        zoom: int = Query(0, ge=0, le=24),
        n_iter: int = Query(500, ge=1, le=100_000),
        n_theta: int = Query(256, ge=8, le=8192),
    ):
        payload = slices.get(slice, "slice")
        model = SliceModel.model_validate(payload)
        window = _tile_window(model.rect, x, y, zoom)
        cfg = ParamSliceJob(
            slice=model,
            ns=TILE_SIZE,
            nt=TILE_SIZE,
            n_iter=n_iter,
            n_theta=n_theta,
            window=window,
        )
        result, entry, _ = compute(cfg)
        png = cache.read_artifact(entry, "classes.png")
        stats = {"counts": result["counts"], "rect": result["rect"]}
        return Response(
            content=png,
            media_type="image/png",
            headers={
                "X-Tile-Stats": json.dumps(stats),
                "ETag": entry.key,
                "Cache-Control": "public, max-age=86400",
            },
        )

    @app.post("/api/classify")
    def classify(body: ClassifyJob):
        maps.put(body.map)  # julia-fiber can now refer to this map by hash
        result, _, _ = compute(body)
        return JSONResponse(result)

    @app.get("/api/julia-fiber")
    def julia_fiber(
        map: str = Query(min_length=8),
        theta: float = Query(0.0),
        re0: float = -2.0,
        re1: float = 2.0,
        im0: float = -2.0,
        im1: float = 2.0,
        width: int = Query(512, ge=16, le=4096),
        height: int = Query(512, ge=16, le=4096),
        budget: int = Query(200, ge=1, le=100_000),
    ):
        desc = maps.get(map, "map")
        cfg = JuliaFiberJob(
            map=desc,
            theta=theta,
            bounds=(re0, re1, im0, im1),
            width=width,
            height=height,
            budget=budget,
        )
        result, entry, _ = compute(cfg)
        png = cache.read_artifact(entry, "julia.png")
        stats = {
            "bounded_fraction": result["bounded_fraction"],
            "escape_radius": result["escape_radius"],
            "theta": result["theta"],
        }
        return Response(
            content=png,
            media_type="image/png",
            headers={
                "X-Fiber-Stats": json.dumps(stats),
                "ETag": entry.key,
                "Cache-Control": "public, max-age=86400",
            },
        )

    @app.post("/api/surgery")
    def surgery(body: SurgeryJob):
        maps.put(body.map)
        result, _, _ = compute(body)
        return JSONResponse(result)

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="explorer")

    return app


def default_app() -> FastAPI:
    return create_app(static_dir=os.environ.get("TORUSDYN_STATIC") or None)
