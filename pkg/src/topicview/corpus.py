"""Transcript ingestion, tokenization, vocabulary construction, and bag-of-words encoding.

Documents for topic training are full sessions by default (one document per
session, all turns concatenated); per-turn documents are available through
``documents_from_sessions(unit="turn")``.
"""

from __future__ import annotations

import hashlib
import json
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import AllTokensFiltered, InvariantError, ParseError

SPEAKERS = ("patient", "therapist")

# Runs of Unicode alphanumerics; underscore is treated as a boundary.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class Turn:
    """One contiguous utterance by one speaker in a session."""

    session_id: str
    turn_index: int
    speaker: str
    text: str
    timestamp: float | None = None


@dataclass(frozen=True)
class Session:
    """An ordered list of turns sharing one session id.

    Construction validates the turn invariants: indices unique, contiguous
    from 0, in order, and every turn carrying this session's id.
    """

    session_id: str
    turns: tuple[Turn, ...]
    condition_tag: str | None = None

    def __post_init__(self):
        if not self.turns:
            raise InvariantError(f"session {self.session_id!r} has no turns")
        for expected, turn in enumerate(self.turns):
            if turn.session_id != self.session_id:
                raise InvariantError(
                    f"session {self.session_id!r} contains a turn from "
                    f"session {turn.session_id!r}"
                )
            if turn.turn_index != expected:
                raise InvariantError(
                    f"session {self.session_id!r}: turn indices must be "
                    f"contiguous from 0, got {turn.turn_index} at position {expected}"
                )
            if turn.speaker not in SPEAKERS:
                raise InvariantError(
                    f"session {self.session_id!r}: unknown speaker {turn.speaker!r}"
                )

    def __len__(self) -> int:
        return len(self.turns)


def session_text(session: Session) -> str:
    """Full session text: turn texts joined by single newlines."""
    return "\n".join(turn.text for turn in session.turns)


def turn_char_offsets(session: Session) -> list[int]:
    """Starting offset of each turn inside ``session_text(session)``."""
    offsets = []
    pos = 0
    for turn in session.turns:
        offsets.append(pos)
        pos += len(turn.text) + 1  # +1 for the joining newline
    return offsets


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric boundaries.

    Tokens of length 1 are dropped; pure-digit tokens are kept.
    """
    return [t for t in _TOKEN_RE.findall(text.lower()) if len(t) > 1]


class Vocabulary:
    """Dense token<->id map with document frequencies.

    Ids are assigned in descending corpus-frequency order, ties broken
    lexicographically, so identical corpora always produce identical files.
    """

    def __init__(
        self,
        tokens: Sequence[str],
        counts: Sequence[int],
        doc_frequencies: Sequence[int],
        total_docs: int,
        min_count: int = 3,
        max_doc_ratio: float = 0.3,
    ):
        if not (len(tokens) == len(counts) == len(doc_frequencies)):
            raise InvariantError("vocabulary columns have unequal lengths")
        self.token_of_id: list[str] = list(tokens)
        self.id_of_token: dict[str, int] = {t: i for i, t in enumerate(tokens)}
        if len(self.id_of_token) != len(self.token_of_id):
            raise InvariantError("vocabulary contains duplicate tokens")
        self.count: list[int] = list(counts)
        self.doc_frequency: list[int] = list(doc_frequencies)
        self.total_docs = total_docs
        self.min_count = min_count
        self.max_doc_ratio = max_doc_ratio

    def __len__(self) -> int:
        return len(self.token_of_id)

    def __contains__(self, token: str) -> bool:
        return token in self.id_of_token

    def get(self, token: str) -> int | None:
        return self.id_of_token.get(token)

    def content_hash(self) -> str:
        """SHA-256 over the token list in id order; identifies the mapping."""
        return tokens_hash(self.token_of_id)


def tokens_hash(tokens: Iterable[str]) -> str:
    h = hashlib.sha256()
    for token in tokens:
        h.update(token.encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def build_vocabulary(
    documents: Sequence[Sequence[str]],
    min_count: int = 3,
    max_doc_ratio: float = 0.3,
) -> Vocabulary:
    """Count tokens over ``documents`` and retain those passing both filters.

    A token survives iff its corpus frequency is >= ``min_count`` and its
    document frequency over ``len(documents)`` is <= ``max_doc_ratio``.

    Raises:
        AllTokensFiltered: nothing survives the filters.
    """
    if not documents:
        raise AllTokensFiltered("no documents given")
    if not (0.0 < max_doc_ratio <= 1.0):
        raise ValueError(f"max_doc_ratio must be in (0, 1], got {max_doc_ratio}")
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")

    counts: Counter[str] = Counter()
    doc_freq: Counter[str] = Counter()
    for doc in documents:
        counts.update(doc)
        doc_freq.update(set(doc))

    total = len(documents)
    kept = [
        t
        for t, c in counts.items()
        if c >= min_count and doc_freq[t] / total <= max_doc_ratio
    ]
    if not kept:
        raise AllTokensFiltered(
            f"no token passed min_count={min_count}, max_doc_ratio={max_doc_ratio} "
            f"over {total} documents"
        )
    kept.sort(key=lambda t: (-counts[t], t))
    return Vocabulary(
        tokens=kept,
        counts=[counts[t] for t in kept],
        doc_frequencies=[doc_freq[t] for t in kept],
        total_docs=total,
        min_count=min_count,
        max_doc_ratio=max_doc_ratio,
    )


@dataclass(frozen=True, eq=False)
class BowVector:
    """Sparse bag-of-words: strictly increasing token ids with counts >= 1."""

    ids: np.ndarray
    counts: np.ndarray

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return zip(self.ids.tolist(), self.counts.tolist())

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def dense(self, vocab_size: int) -> np.ndarray:
        out = np.zeros(vocab_size, dtype=np.float64)
        out[self.ids] = self.counts
        return out


def to_bow(document: Sequence[str], vocab: Vocabulary) -> BowVector:
    """Encode a token list against ``vocab``; out-of-vocabulary tokens are dropped."""
    if len(vocab) == 0:
        raise InvariantError("empty vocabulary")
    counter: Counter[int] = Counter()
    for token in document:
        token_id = vocab.id_of_token.get(token)
        if token_id is not None:
            counter[token_id] += 1
    ids = sorted(counter)
    return BowVector(
        ids=np.asarray(ids, dtype=np.int64),
        counts=np.asarray([counter[i] for i in ids], dtype=np.int64),
    )


def documents_from_sessions(
    sessions: Sequence[Session], unit: str = "session"
) -> list[list[str]]:
    """Tokenize sessions into training documents.

    ``unit="session"`` concatenates all turns of a session into one document;
    ``unit="turn"`` yields one document per turn.
    """
    if unit == "session":
        return [tokenize(session_text(s)) for s in sessions]
    if unit == "turn":
        return [tokenize(t.text) for s in sessions for t in s.turns]
    raise ValueError(f"unknown document unit {unit!r}")


# --- transcript files -------------------------------------------------------

_REQUIRED_KEYS = ("session_id", "turn_index", "speaker", "text")


def load_transcripts(path: str | Path) -> list[Session]:
    """Read a JSONL transcript file into sessions.

    One turn per line: ``{"session_id", "turn_index", "speaker", "text",
    "timestamp"?, "condition_tag"?}``. Sessions are returned in order of first
    appearance with turns sorted by ``turn_index``.

    Raises:
        ParseError: malformed line (bad JSON, missing key, bad value).
        InvariantError: duplicate or missing turn_index within a session.
    """
    path = Path(path)
    turns_by_session: dict[str, list[Turn]] = {}
    tags: dict[str, str | None] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line_no) from exc
            if not isinstance(record, dict):
                raise ParseError("expected a JSON object", line_no)
            for key in _REQUIRED_KEYS:
                if key not in record:
                    raise ParseError(f"missing key {key!r}", line_no)
            if record["speaker"] not in SPEAKERS:
                raise ParseError(
                    f"speaker must be one of {SPEAKERS}, got {record['speaker']!r}",
                    line_no,
                )
            if not isinstance(record["turn_index"], int) or isinstance(
                record["turn_index"], bool
            ):
                raise ParseError("turn_index must be an integer", line_no)
            if not isinstance(record["text"], str):
                raise ParseError("text must be a string", line_no)
            timestamp = record.get("timestamp")
            if timestamp is not None and not isinstance(timestamp, (int, float)):
                raise ParseError("timestamp must be a number", line_no)
            session_id = record["session_id"]
            if not isinstance(session_id, str):
                raise ParseError("session_id must be a string", line_no)
            turn = Turn(
                session_id=session_id,
                turn_index=record["turn_index"],
                speaker=record["speaker"],
                text=record["text"],
                timestamp=None if timestamp is None else float(timestamp),
            )
            turns_by_session.setdefault(session_id, []).append(turn)
            tag = record.get("condition_tag")
            if tag is not None:
                if not isinstance(tag, str):
                    raise ParseError("condition_tag must be a string", line_no)
                previous = tags.get(session_id)
                if previous is not None and previous != tag:
                    raise InvariantError(
                        f"session {session_id!r} carries conflicting condition tags "
                        f"{previous!r} and {tag!r}"
                    )
                tags[session_id] = tag

    sessions = []
    for session_id, turns in turns_by_session.items():
        turns.sort(key=lambda t: t.turn_index)
        seen = [t.turn_index for t in turns]
        if len(set(seen)) != len(seen):
            raise InvariantError(f"session {session_id!r} has duplicate turn indices")
        sessions.append(
            Session(
                session_id=session_id,
                turns=tuple(turns),
                condition_tag=tags.get(session_id),
            )
        )
    return sessions


def save_transcripts(sessions: Sequence[Session], path: str | Path) -> None:
    """Write sessions as JSONL, inverse of :func:`load_transcripts`."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for session in sessions:
            for turn in session.turns:
                record: dict = {
                    "session_id": turn.session_id,
                    "turn_index": turn.turn_index,
                    "speaker": turn.speaker,
                    "text": turn.text,
                }
                if turn.timestamp is not None:
                    record["timestamp"] = turn.timestamp
                if session.condition_tag is not None:
                    record["condition_tag"] = session.condition_tag
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")


# --- vocabulary files -------------------------------------------------------


def save_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    """Write ``V total_docs`` then ``token count doc_frequency`` per id."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(vocab)} {vocab.total_docs}\n")
        for i, token in enumerate(vocab.token_of_id):
            fh.write(f"{token} {vocab.count[i]} {vocab.doc_frequency[i]}\n")


def load_vocabulary(path: str | Path) -> Vocabulary:
    """Inverse of :func:`save_vocabulary`.

    The filter settings are not stored in the file; the loaded vocabulary
    carries the tightest filters its rows still satisfy.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline()
        parts = header.split()
        if len(parts) != 2:
            raise ParseError("header must be 'V total_docs'", 1)
        try:
            size, total_docs = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ParseError("header must hold two integers", 1) from exc
        tokens, counts, doc_freqs = [], [], []
        for line_no, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != 3:
                raise ParseError("expected 'token count doc_frequency'", line_no)
            try:
                count, doc_freq = int(fields[1]), int(fields[2])
            except ValueError as exc:
                raise ParseError("count and doc_frequency must be integers", line_no) from exc
            tokens.append(fields[0])
            counts.append(count)
            doc_freqs.append(doc_freq)
    if len(tokens) != size:
        raise ParseError(f"header declares {size} tokens, file holds {len(tokens)}")
    return Vocabulary(
        tokens=tokens,
        counts=counts,
        doc_frequencies=doc_freqs,
        total_docs=total_docs,
        min_count=min(counts) if counts else 1,
        max_doc_ratio=max(d / total_docs for d in doc_freqs) if doc_freqs else 1.0,
    )
