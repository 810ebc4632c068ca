"""TOML configuration for the artifact store, trainers, and server."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .embeddings import SgnsConfig
from .errors import ConfigError
from .etm import EtmConfig


@dataclass
class CorpusSettings:
    transcripts: Path = Path("transcripts.jsonl")
    vocabulary: Path = Path("vocab.txt")
    min_count: int = 3
    max_doc_ratio: float = 0.3
    document_unit: str = "session"  # or "turn"


@dataclass
class ImagegenSettings:
    backend: str = "mock"  # mock | http
    media_dir: Path = Path("data")
    max_chars: int = 1000
    concurrency: int = 2
    reject_marker: str = "REJECTME"  # mock backend only


@dataclass
class ServerSettings:
    port: int = 8080
    static_dir: Path | None = None


@dataclass
class AppConfig:
    root: Path
    corpus: CorpusSettings
    embeddings_path: Path
    sgns: SgnsConfig
    model_path: Path
    etm: EtmConfig
    imagegen: ImagegenSettings
    server: ServerSettings

    def resolve(self, p: Path) -> Path:
        return p if p.is_absolute() else self.root / p


def _take(section: dict, key: str, default):
    value = section.get(key, default)
    if default is not None and value is not None and not isinstance(value, type(default)):
        # TOML ints are valid floats
        if isinstance(default, float) and isinstance(value, int):
            return float(value)
        raise ConfigError(f"{key} must be {type(default).__name__}, got {value!r}")
    return value


def load_config(path: str | Path) -> AppConfig:
    """Parse a config file; relative paths resolve against its directory.

    Sections: [corpus], [embeddings], [etm], [imagegen], [server]; every key
    is optional and falls back to the documented default.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with path.open("rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc

    corpus_raw = raw.get("corpus", {})
    corpus = CorpusSettings(
        transcripts=Path(_take(corpus_raw, "transcripts", "transcripts.jsonl")),
        vocabulary=Path(_take(corpus_raw, "vocabulary", "vocab.txt")),
        min_count=_take(corpus_raw, "min_count", 3),
        max_doc_ratio=_take(corpus_raw, "max_doc_ratio", 0.3),
        document_unit=_take(corpus_raw, "document_unit", "session"),
    )
    if corpus.document_unit not in ("session", "turn"):
        raise ConfigError(f"document_unit must be 'session' or 'turn', got {corpus.document_unit!r}")

    emb_raw = raw.get("embeddings", {})
    try:
        sgns = SgnsConfig(
            dim=_take(emb_raw, "dim", 128),
            window=_take(emb_raw, "window", 5),
            negatives=_take(emb_raw, "negatives", 5),
            epochs=_take(emb_raw, "epochs", 5),
            initial_lr=_take(emb_raw, "initial_lr", 0.025),
            seed=_take(emb_raw, "seed", 1),
            unigram_power=_take(emb_raw, "unigram_power", 0.75),
            deterministic=_take(emb_raw, "deterministic", True),
            workers=_take(emb_raw, "workers", 4),
        )
    except ValueError as exc:
        raise ConfigError(f"[embeddings]: {exc}") from exc

    etm_raw = raw.get("etm", {})
    try:
        etm = EtmConfig(
            topics=_take(etm_raw, "topics", 10),
            epochs=_take(etm_raw, "epochs", 100),
            batch_size=_take(etm_raw, "batch_size", 16),
            lr=_take(etm_raw, "lr", 5e-3),
            seed=_take(etm_raw, "seed", 1),
            train_embeddings=_take(etm_raw, "train_embeddings", False),
            hidden=_take(etm_raw, "hidden", 128),
        )
    except ValueError as exc:
        raise ConfigError(f"[etm]: {exc}") from exc

    img_raw = raw.get("imagegen", {})
    imagegen = ImagegenSettings(
        backend=_take(img_raw, "backend", "mock"),
        media_dir=Path(_take(img_raw, "media_dir", "data")),
        max_chars=_take(img_raw, "max_chars", 1000),
        concurrency=_take(img_raw, "concurrency", 2),
        reject_marker=_take(img_raw, "reject_marker", "REJECTME"),
    )
    if imagegen.backend not in ("mock", "http"):
        raise ConfigError(f"imagegen backend must be 'mock' or 'http', got {imagegen.backend!r}")

    server_raw = raw.get("server", {})
    static_dir = server_raw.get("static_dir")
    server = ServerSettings(
        port=_take(server_raw, "port", 8080),
        static_dir=Path(static_dir) if static_dir else None,
    )

    return AppConfig(
        root=path.parent.resolve(),
        corpus=corpus,
        embeddings_path=Path(_take(emb_raw, "path", "embeddings.txt")),
        sgns=sgns,
        model_path=Path(_take(etm_raw, "path", "model.json")),
        etm=etm,
        imagegen=imagegen,
        server=server,
    )
