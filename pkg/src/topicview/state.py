"""Loaded artifact snapshot and the feature code paths shared by CLI and HTTP."""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from pathlib import Path

from . import corpus as corpus_mod
from . import imagegen as imagegen_mod
from .config import AppConfig, load_config
from .corpus import Session, Vocabulary, load_transcripts, load_vocabulary
from .embeddings import EmbeddingMatrix, load_embeddings
from .errors import ArtifactMismatch, ConfigError
from .etm import TopicModel, load_topic_model
from .imagegen import ImageBackend, ImageRequestOutcome
from .temporal import TopicScoreSeries, score_session

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class AppState:
    """Immutable artifact trio plus the two mutable caches.

    The vocabulary, embeddings, and model are loaded once and never change
    while serving; the score cache and image outcome store are guarded for
    exclusive writes.
    """

    config: AppConfig
    vocab: Vocabulary
    rho: EmbeddingMatrix
    model: TopicModel
    sessions: dict[str, Session]
    media_root: Path
    _score_cache: dict[str, TopicScoreSeries] = field(default_factory=dict)
    _score_lock: threading.Lock = field(default_factory=threading.Lock)
    _image_locks: dict[str, threading.Lock] = field(default_factory=dict)
    _image_locks_guard: threading.Lock = field(default_factory=threading.Lock)

    def get_session(self, session_id: str) -> Session | None:
        return self.sessions.get(session_id)

    def get_scores(self, session_id: str) -> TopicScoreSeries:
        """Score a session on first request, then serve the cached series."""
        session = self.sessions[session_id]
        with self._score_lock:
            cached = self._score_cache.get(session_id)
        if cached is not None:
            return cached
        series = score_session(session, self.model, self.vocab, self.rho)
        with self._score_lock:
            return self._score_cache.setdefault(session_id, series)

    def outcomes_path(self, session_id: str) -> Path:
        return self.media_root / session_id / "images.json"

    def stored_outcomes(self, session_id: str) -> list[ImageRequestOutcome]:
        return imagegen_mod.load_outcomes(self.outcomes_path(session_id))

    def generate_session_images(
        self, session_id: str, backend: ImageBackend
    ) -> list[ImageRequestOutcome]:
        """Chunk the session text, run the backend, persist the outcome set.

        Repeated runs replace the previous set; generation per session is
        serialized so concurrent posts cannot interleave file writes.
        """
        session = self.sessions[session_id]
        with self._image_locks_guard:
            lock = self._image_locks.setdefault(session_id, threading.Lock())
        with lock:
            excerpts = imagegen_mod.chunk_transcript(
                corpus_mod.session_text(session),
                max_chars=self.config.imagegen.max_chars,
                session_id=session_id,
            )
            outcomes = imagegen_mod.generate_images(
                excerpts,
                backend,
                self.media_root,
                max_in_flight=self.config.imagegen.concurrency,
            )
            self.outcomes_path(session_id).parent.mkdir(parents=True, exist_ok=True)
            imagegen_mod.save_outcomes(outcomes, self.outcomes_path(session_id))
        return outcomes


def make_backend(config: AppConfig) -> ImageBackend:
    if config.imagegen.backend == "http":
        return imagegen_mod.HttpImageBackend()
    return imagegen_mod.MockImageBackend(reject_marker=config.imagegen.reject_marker)


def load_state(config_path: str | Path) -> AppState:
    """Load artifacts named by the config and verify they belong together.

    Raises:
        ConfigError: missing config or artifact files.
        ArtifactMismatch: embeddings/model were built against another vocabulary.
    """
    config = load_config(config_path)

    transcripts = config.resolve(config.corpus.transcripts)
    vocab_path = config.resolve(config.corpus.vocabulary)
    embeddings_path = config.resolve(config.embeddings_path)
    model_path = config.resolve(config.model_path)
    for label, p in (
        ("transcripts", transcripts),
        ("vocabulary", vocab_path),
        ("embeddings", embeddings_path),
        ("model", model_path),
    ):
        if not p.exists():
            raise ConfigError(f"{label} file not found: {p}")

    vocab = load_vocabulary(vocab_path)
    rho = load_embeddings(embeddings_path)
    if rho.content_hash() != vocab.content_hash():
        raise ArtifactMismatch(
            "embedding rows do not match the vocabulary (token lists differ)"
        )
    model = load_topic_model(model_path, rho)  # verifies the model's vocab hash

    sessions = {s.session_id: s for s in load_transcripts(transcripts)}
    media_root = config.resolve(config.imagegen.media_dir)
    media_root.mkdir(parents=True, exist_ok=True)

    logger.info(
        "state loaded: %d sessions, V=%d, D=%d, K=%d",
        len(sessions), len(vocab), rho.dim, model.k,
    )
    return AppState(
        config=config,
        vocab=vocab,
        rho=rho,
        model=model,
        sessions=sessions,
        media_root=media_root,
    )
