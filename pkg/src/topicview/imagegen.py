"""Excerpt chunking and pluggable image generation.

A session's text is tiled into excerpts of at most 1,000 characters, and each
excerpt becomes one image request. Safety rejections are first-class outcomes
rather than errors: the dashboard renders them as placeholder tiles.
"""

from __future__ import annotations

import base64
import hashlib
import io
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Protocol, Sequence

import httpx
from PIL import Image

from .errors import BackendUnreachable, RequestFailed, SafetyRejected, TransportError

logger = logging.getLogger(__name__)

DEFAULT_MAX_CHARS = 1000

GENERATED = "generated"
REJECTED_SAFETY = "rejected_safety"
FAILED = "failed"


@dataclass(frozen=True)
class Excerpt:
    session_id: str
    ordinal: int
    char_start: int
    char_end: int
    text: str


@dataclass
class ImageRequestOutcome:
    ordinal: int
    status: str  # generated | rejected_safety | failed
    image_path: str | None
    detail: str
    char_start: int = 0
    char_end: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def chunk_transcript(
    text: str, max_chars: int = DEFAULT_MAX_CHARS, session_id: str = ""
) -> list[Excerpt]:
    """Tile ``text`` into excerpts of at most ``max_chars`` characters.

    Greedy fill; when a cut is forced the split point backs up to the last
    whitespace inside the window, so words stay intact unless a single token
    exceeds ``max_chars``. Offsets are code-point based and the excerpt texts
    concatenate back to ``text`` exactly.
    """
    if max_chars < 1:
        raise ValueError(f"max_chars must be >= 1, got {max_chars}")
    excerpts: list[Excerpt] = []
    pos = 0
    ordinal = 0
    length = len(text)
    while pos < length:
        if length - pos <= max_chars:
            end = length
        else:
            window = text[pos : pos + max_chars]
            split = _last_whitespace(window)
            end = pos + (split + 1 if split is not None else max_chars)
        excerpts.append(
            Excerpt(
                session_id=session_id,
                ordinal=ordinal,
                char_start=pos,
                char_end=end,
                text=text[pos:end],
            )
        )
        pos = end
        ordinal += 1
    return excerpts


def _last_whitespace(window: str) -> int | None:
    for i in range(len(window) - 1, -1, -1):
        if window[i].isspace():
            return i
    return None


class ImageBackend(Protocol):
    """Renders one prompt to PNG bytes or raises an outcome-typed error."""

    def render(self, prompt: str) -> bytes: ...


class MockImageBackend:
    """Deterministic offline backend for tests and demos.

    The image pixels are derived from a hash of the prompt text, so re-running
    a batch reproduces byte-identical files. Prompts containing
    ``reject_marker`` simulate a content-policy rejection; ``fail_marker``
    simulates a transport failure.
    """

    def __init__(
        self,
        size: int = 24,
        reject_marker: str = "REJECTME",
        fail_marker: str | None = None,
    ):
        self.size = size
        self.reject_marker = reject_marker
        self.fail_marker = fail_marker

    def render(self, prompt: str) -> bytes:
        if self.fail_marker and self.fail_marker in prompt:
            raise TransportError("mock transport failure")
        if self.reject_marker and self.reject_marker in prompt:
            raise SafetyRejected("mock safety filter matched the prompt")
        digest = hashlib.sha256(prompt.encode("utf-8")).digest()
        pixels = bytes(
            digest[(x * 31 + y * 7 + channel) % len(digest)]
            for y in range(self.size)
            for x in range(self.size)
            for channel in range(3)
        )
        image = Image.frombytes("RGB", (self.size, self.size), pixels)
        buf = io.BytesIO()
        image.save(buf, format="PNG")
        return buf.getvalue()


class HttpImageBackend:
    """Generic remote backend: POST {"prompt": ...} and receive a PNG.

    A 200 answer carries either ``b64`` image bytes or a ``url`` to fetch;
    a 400 answer is treated as a content-policy rejection with the body
    preserved as detail. Endpoint and token default to the ``IMAGEGEN_URL``
    and ``IMAGEGEN_TOKEN`` environment variables.
    """

    def __init__(
        self,
        url: str | None = None,
        token: str | None = None,
        timeout: float = 30.0,
        client: httpx.Client | None = None,
    ):
        self.url = url or os.environ.get("IMAGEGEN_URL", "")
        if not self.url:
            raise ValueError("no endpoint: pass url= or set IMAGEGEN_URL")
        self.token = token if token is not None else os.environ.get("IMAGEGEN_TOKEN")
        self._client = client or httpx.Client(timeout=timeout)

    def render(self, prompt: str) -> bytes:
        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        try:
            response = self._client.post(self.url, json={"prompt": prompt}, headers=headers)
        except httpx.HTTPError as exc:
            raise TransportError(f"image backend unreachable: {exc}") from exc
        if response.status_code == 400:
            raise SafetyRejected(response.text)
        if response.status_code != 200:
            raise RequestFailed(f"HTTP {response.status_code}: {response.text}")
        body = response.json()
        if "b64" in body:
            return base64.b64decode(body["b64"])
        if "url" in body:
            try:
                image = self._client.get(body["url"])
            except httpx.HTTPError as exc:
                raise TransportError(f"image fetch failed: {exc}") from exc
            if image.status_code != 200:
                raise RequestFailed(f"image fetch HTTP {image.status_code}")
            return image.content
        raise RequestFailed("response carries neither 'b64' nor 'url'")


def generate_images(
    excerpts: Sequence[Excerpt],
    backend: ImageBackend,
    media_root: str | Path,
    max_in_flight: int = 2,
) -> list[ImageRequestOutcome]:
    """Request one image per excerpt; never aborts on individual failures.

    Generated PNGs land at ``{media_root}/{session_id}/images/
    {session_id}_{ordinal}.png``, replacing any previous set for the session.
    Outcomes come back ordered by excerpt ordinal.

    Raises:
        BackendUnreachable: every request failed at the transport level.
    """
    if not excerpts:
        return []
    media_root = Path(media_root)
    session_dirs = {e.session_id for e in excerpts}
    for session_id in session_dirs:
        image_dir = media_root / session_id / "images"
        image_dir.mkdir(parents=True, exist_ok=True)
        for old in image_dir.glob("*.png"):
            old.unlink()

    def request(excerpt: Excerpt) -> tuple[ImageRequestOutcome, bool]:
        target = (
            media_root
            / excerpt.session_id
            / "images"
            / f"{excerpt.session_id}_{excerpt.ordinal}.png"
        )
        span = (excerpt.char_start, excerpt.char_end)
        try:
            payload = backend.render(excerpt.text)
        except SafetyRejected as exc:
            return ImageRequestOutcome(
                excerpt.ordinal, REJECTED_SAFETY, None, str(exc), *span
            ), False
        except TransportError as exc:
            return ImageRequestOutcome(
                excerpt.ordinal, FAILED, None, str(exc), *span
            ), True
        except RequestFailed as exc:
            return ImageRequestOutcome(
                excerpt.ordinal, FAILED, None, str(exc), *span
            ), False
        target.write_bytes(payload)
        return ImageRequestOutcome(
            excerpt.ordinal, GENERATED, str(target), "", *span
        ), False

    with ThreadPoolExecutor(max_workers=max(1, max_in_flight)) as pool:
        results = list(pool.map(request, excerpts))
    results.sort(key=lambda pair: pair[0].ordinal)

    if results and all(transport for _, transport in results):
        raise BackendUnreachable(
            f"all {len(results)} image requests failed at the transport level"
        )
    return [outcome for outcome, _ in results]


def save_outcomes(outcomes: Sequence[ImageRequestOutcome], path: str | Path) -> None:
    Path(path).write_text(
        json.dumps([o.to_dict() for o in outcomes]), encoding="utf-8"
    )


def load_outcomes(path: str | Path) -> list[ImageRequestOutcome]:
    if not Path(path).exists():
        return []
    records = json.loads(Path(path).read_text(encoding="utf-8"))
    return [ImageRequestOutcome(**r) for r in records]
