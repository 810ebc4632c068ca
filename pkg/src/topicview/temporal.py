"""Per-turn topic scoring: the N x K cosine time series and 3D trajectories.

Each turn is embedded as the unweighted mean of its in-vocabulary word
vectors; each topic as the beta-weighted mean of its top word vectors. A turn
with no usable words embeds to the zero vector and scores 0 on every topic.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import Session, Turn, Vocabulary, tokenize
from .embeddings import EmbeddingMatrix, cosine
from .errors import DuplicateTopic, VocabMismatch
from .etm import TopicModel


@dataclass(frozen=True, eq=False)
class ScoreRow:
    turn_index: int
    speaker: str
    scores: np.ndarray  # length K, entries in [-1, 1]


@dataclass(eq=False)
class TopicScoreSeries:
    session_id: str
    topic_count: int
    rows: tuple[ScoreRow, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def matrix(self) -> np.ndarray:
        return np.vstack([r.scores for r in self.rows])


@dataclass(frozen=True)
class TrajectoryPoint:
    turn_index: int
    x: float
    y: float
    z: float


def embed_turn(turn: Turn, vocab: Vocabulary, rho: EmbeddingMatrix) -> np.ndarray:
    """Unweighted mean of the turn's in-vocabulary word vectors.

    An empty or fully out-of-vocabulary turn maps to the zero vector.
    """
    ids = [vocab.id_of_token[t] for t in tokenize(turn.text) if t in vocab.id_of_token]
    if not ids:
        return np.zeros(rho.dim)
    return rho.vectors[ids].mean(axis=0)


def embed_topic(model: TopicModel, k: int, top_n: int = 10) -> np.ndarray:
    """Beta-weighted mean of topic k's top ``top_n`` word vectors.

    Weights are the beta values over those words, renormalized to sum to 1.
    """
    if not 0 <= k < model.k:
        raise IndexError(f"topic {k} out of range for K={model.k}")
    top_n = min(top_n, model.vocab_size)
    order = np.argsort(-model.beta[k], kind="stable")[:top_n]
    weights = model.beta[k, order]
    weights = weights / weights.sum()
    return weights @ model.rho.vectors[order]


def score_session(
    session: Session,
    model: TopicModel,
    vocab: Vocabulary,
    rho: EmbeddingMatrix,
) -> TopicScoreSeries:
    """Score every turn of a session against every topic.

    Row i, column j holds cosine(embed_topic(j), embed_turn(i)); the two
    speakers' turns are independent rows tagged by speaker.

    Raises:
        VocabMismatch: ``vocab`` differs from the model's training vocabulary.
    """
    trained_hash = model.train_meta.get("vocab_hash")
    if trained_hash is not None and trained_hash != vocab.content_hash():
        raise VocabMismatch(
            f"session {session.session_id!r}: vocabulary hash differs from the "
            "model's training vocabulary"
        )
    topic_vectors = [embed_topic(model, k) for k in range(model.k)]
    rows = []
    for turn in session.turns:
        turn_vector = embed_turn(turn, vocab, rho)
        scores = np.array([cosine(tv, turn_vector) for tv in topic_vectors])
        rows.append(ScoreRow(turn.turn_index, turn.speaker, scores))
    return TopicScoreSeries(
        session_id=session.session_id, topic_count=model.k, rows=tuple(rows)
    )


def trajectory(
    series: TopicScoreSeries, topics: tuple[int, int, int]
) -> list[TrajectoryPoint]:
    """Project the series onto three distinct topics, one point per turn."""
    a, b, c = topics
    if len({a, b, c}) != 3:
        raise DuplicateTopic(f"topic triple {topics} has duplicates")
    for t in (a, b, c):
        if not 0 <= t < series.topic_count:
            raise IndexError(f"topic {t} out of range for K={series.topic_count}")
    return [
        TrajectoryPoint(
            turn_index=row.turn_index,
            x=float(row.scores[a]),
            y=float(row.scores[b]),
            z=float(row.scores[c]),
        )
        for row in series.rows
    ]


def write_scores_csv(series: TopicScoreSeries, path: str | Path | io.TextIOBase) -> None:
    """CSV export: turn_index, speaker, then one 6-decimal column per topic."""
    header = ["turn_index", "speaker"] + [f"topic_{k}" for k in range(series.topic_count)]

    def write(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in series.rows:
            writer.writerow(
                [row.turn_index, row.speaker] + [f"{s:.6f}" for s in row.scores]
            )

    if isinstance(path, (str, Path)):
        with Path(path).open("w", encoding="utf-8", newline="") as fh:
            write(fh)
    else:
        write(path)
