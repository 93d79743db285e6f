"""HTTP endpoints over the search service.

Responses are rendered through the canonical serializer so the wire bytes
are stable field-for-field; errors come back as {"code", "message"} with a
machine-readable code.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.staticfiles import StaticFiles

from .errors import PageOutOfRange, ParseError, RasterDictError, UnknownTarget
from .feedback import IrrelevantPage, UnknownDictionary
from .location import MarkerOutOfBounds, MixedTarget, OrderViolation
from .prefix import UnknownPrefix
from .service import InvalidPayload, SearchService, serialize_response
from .sparse import EmptyIndex, SortViolation
from .store import DictionaryStore, DuplicateId, IllegalTransition, MissingArtifact, UnknownLanguage

_STATUS_BY_ERROR = {
    UnknownLanguage: 404,
    UnknownDictionary: 404,
    UnknownPrefix: 404,
    UnknownTarget: 404,
    DuplicateId: 409,
    IllegalTransition: 409,
    MissingArtifact: 409,
    InvalidPayload: 400,
    IrrelevantPage: 400,
    MarkerOutOfBounds: 400,
    MixedTarget: 400,
    OrderViolation: 400,
    PageOutOfRange: 400,
    ParseError: 400,
    SortViolation: 400,
    EmptyIndex: 400,
}


def _error_response(exc: RasterDictError) -> Response:
    status = _STATUS_BY_ERROR.get(type(exc), 400)
    return _json({"code": exc.code, "message": str(exc)}, status)


def _json(payload: dict, status: int = 200) -> Response:
    return Response(
        content=serialize_response(payload),
        status_code=status,
        media_type="application/json",
    )


def create_app(
    store: DictionaryStore,
    service: SearchService | None = None,
    static_dir: str | None = None,
) -> FastAPI:
    service = service or SearchService(store)
    app = FastAPI(title="rasterdict", docs_url=None, redoc_url=None)

    @app.exception_handler(RasterDictError)
    async def handle_domain_error(request: Request, exc: RasterDictError):
        return _error_response(exc)

    @app.exception_handler(ValueError)
    async def handle_value_error(request: Request, exc: ValueError):
        return _json({"code": "INVALID_PAYLOAD", "message": str(exc)}, 400)

    @app.get("/api/languages")
    def list_languages():
        return _json(service.language_listing())

    @app.get("/api/languages/{code}/keyboard")
    def keyboard(code: str):
        layout = store.keyboard_layout(code)
        return _json({"language": code, "layout": layout})

    @app.get("/api/languages/{code}/prefix")
    def prefix_root(code: str):
        return _json(service.list_prefix(code, ""))

    @app.get("/api/languages/{code}/prefix/{prefix}")
    def prefix_expand(code: str, prefix: str):
        return _json(service.list_prefix(code, prefix))

    @app.get("/api/search")
    def search(lang: str, q: str):
        return _json(service.search(q, lang))

    @app.post("/api/feedback")
    async def feedback(request: Request):
        return _json(service.submit_feedback(await request.json()))

    @app.post("/api/markers")
    async def markers(request: Request):
        return _json(service.submit_marker(await request.json()))

    @app.post("/api/annotations")
    async def annotations(request: Request):
        return _json(service.submit_annotation(await request.json()))

    @app.post("/api/digitizations")
    async def digitizations(request: Request):
        return _json(service.submit_digitization(await request.json()))

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
