"""HTTP API serving scores, trajectories, transcripts, topics, and images.

Every feature delegates to the same :class:`AppState` methods the CLI uses,
and every error response serializes the one ApiError shape.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from .corpus import turn_char_offsets
from .errors import BackendUnreachable, DuplicateTopic
from .etm import topic_word_weights
from .imagegen import ImageBackend, ImageRequestOutcome
from .state import AppState, make_backend
from .temporal import trajectory as project_trajectory

logger = logging.getLogger(__name__)

NOT_FOUND = "not_found"
BAD_REQUEST = "bad_request"
BACKEND_ERROR = "backend_error"
INVARIANT_VIOLATION = "invariant_violation"


@dataclass
class ApiError(Exception):
    http_status: int
    code: str
    message: str

    def body(self) -> dict:
        return {
            "http_status": self.http_status,
            "code": self.code,
            "message": self.message,
        }


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"http_status": status, "code": code, "message": message},
    )


def _outcome_payload(outcome: ImageRequestOutcome, media_root: Path) -> dict:
    image_url = None
    if outcome.image_path:
        relative = Path(outcome.image_path).resolve().relative_to(media_root.resolve())
        image_url = "/media/" + relative.as_posix()
    return {
        "ordinal": outcome.ordinal,
        "status": outcome.status,
        "image_url": image_url,
        "detail": outcome.detail,
        "char_start": outcome.char_start,
        "char_end": outcome.char_end,
    }


def create_app(state: AppState, backend: ImageBackend | None = None) -> FastAPI:
    """Build the application over a loaded artifact snapshot."""
    backend = backend or make_backend(state.config)
    app = FastAPI(title="topicview", docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.http_status, content=exc.body())

    @app.exception_handler(RequestValidationError)
    async def handle_validation(request: Request, exc: RequestValidationError):
        return _error_response(400, BAD_REQUEST, str(exc.errors()))

    @app.exception_handler(StarletteHTTPException)
    async def handle_http_exception(request: Request, exc: StarletteHTTPException):
        code = NOT_FOUND if exc.status_code == 404 else (
            BAD_REQUEST if exc.status_code < 500 else INVARIANT_VIOLATION
        )
        return _error_response(exc.status_code, code, str(exc.detail))

    @app.exception_handler(Exception)
    async def handle_unexpected(request: Request, exc: Exception):
        logger.exception("unhandled error on %s", request.url.path)
        return _error_response(500, INVARIANT_VIOLATION, f"{type(exc).__name__}: {exc}")

    def require_session(session_id: str):
        session = state.get_session(session_id)
        if session is None:
            raise ApiError(404, NOT_FOUND, f"unknown session {session_id!r}")
        return session

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/api/sessions")
    def list_sessions():
        return {
            "sessions": [
                {
                    "session_id": s.session_id,
                    "turn_count": len(s.turns),
                    "condition_tag": s.condition_tag,
                }
                for s in state.sessions.values()
            ]
        }

    @app.get("/api/topics")
    def list_topics():
        """Topic index plus its ten strongest words with beta weights."""
        topics = []
        for k, pairs in enumerate(topic_word_weights(state.model)):
            topics.append(
                {
                    "index": k,
                    "words": [{"word": w, "weight": b} for w, b in pairs],
                }
            )
        return {"topic_count": state.model.k, "topics": topics}

    @app.get("/api/sessions/{session_id}/scores")
    def get_scores(session_id: str):
        """Per-turn, per-topic cosine scores; computed once then cached."""
        require_session(session_id)
        series = state.get_scores(session_id)
        return {
            "session_id": session_id,
            "topic_count": series.topic_count,
            "turn_count": len(series),
            "rows": [
                {
                    "turn_index": row.turn_index,
                    "speaker": row.speaker,
                    "scores": [float(s) for s in row.scores],
                }
                for row in series.rows
            ],
        }

    @app.get("/api/sessions/{session_id}/trajectory")
    def get_trajectory(session_id: str, topics: str = Query("0,1,2")):
        require_session(session_id)
        parts = topics.split(",")
        if len(parts) != 3:
            raise ApiError(400, BAD_REQUEST, "topics must be three comma-separated indices")
        try:
            triple = tuple(int(p) for p in parts)
        except ValueError:
            raise ApiError(400, BAD_REQUEST, f"non-integer topic in {topics!r}")
        series = state.get_scores(session_id)
        try:
            points = project_trajectory(series, triple)  # type: ignore[arg-type]
        except (IndexError, DuplicateTopic) as exc:
            raise ApiError(400, BAD_REQUEST, str(exc))
        return {
            "session_id": session_id,
            "topics": list(triple),
            "points": [
                {"turn_index": p.turn_index, "x": p.x, "y": p.y, "z": p.z}
                for p in points
            ],
        }

    @app.get("/api/sessions/{session_id}/transcript")
    def get_transcript(
        session_id: str,
        from_turn: int | None = Query(None, alias="from"),
        to_turn: int | None = Query(None, alias="to"),
    ):
        """Turns in order, optionally sliced to the inclusive [from, to] range."""
        session = require_session(session_id)
        n = len(session.turns)
        lo = 0 if from_turn is None else from_turn
        hi = n - 1 if to_turn is None else to_turn
        if lo > hi:
            raise ApiError(400, BAD_REQUEST, f"inverted range: from={lo} > to={hi}")
        if lo < 0 or hi >= n:
            raise ApiError(400, BAD_REQUEST, f"range [{lo}, {hi}] outside [0, {n - 1}]")
        offsets = turn_char_offsets(session)
        return {
            "session_id": session_id,
            "turn_count": n,
            "turns": [
                {
                    "turn_index": t.turn_index,
                    "speaker": t.speaker,
                    "text": t.text,
                    "timestamp": t.timestamp,
                    "char_start": offsets[t.turn_index],
                }
                for t in session.turns[lo : hi + 1]
            ],
        }

    @app.post("/api/sessions/{session_id}/images")
    def post_images(session_id: str):
        """Regenerate the session's excerpt images, replacing any stored set."""
        require_session(session_id)
        try:
            outcomes = state.generate_session_images(session_id, backend)
        except BackendUnreachable as exc:
            raise ApiError(502, BACKEND_ERROR, str(exc))
        return {
            "session_id": session_id,
            "outcomes": [_outcome_payload(o, state.media_root) for o in outcomes],
        }

    @app.get("/api/sessions/{session_id}/images")
    def get_images(session_id: str):
        """The stored outcome set; empty until the first POST."""
        require_session(session_id)
        outcomes = state.stored_outcomes(session_id)
        return {
            "session_id": session_id,
            "outcomes": [_outcome_payload(o, state.media_root) for o in outcomes],
        }

    app.mount("/media", StaticFiles(directory=state.media_root), name="media")
    static_dir = (
        state.config.resolve(state.config.server.static_dir)
        if state.config.server.static_dir
        else None
    )
    if static_dir and static_dir.is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="dashboard")

    return app
