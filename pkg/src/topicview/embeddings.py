"""Skip-gram negative-sampling word embeddings and vector utilities.

One embedding space is shared by topics and turns, so the trainer returns the
input-side vectors only. Deterministic mode (the default) is single-threaded
with a seeded generator and reproduces bit-identical matrices; fast mode runs
classic lock-free data-parallel updates and is flagged nondeterministic.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.special import expit

from .errors import DegenerateCorpus, DimensionMismatch, NumericalError, ParseError
from .corpus import Vocabulary, tokens_hash

logger = logging.getLogger(__name__)

MIN_LR = 1e-4


@dataclass
class SgnsConfig:
    dim: int = 128
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    initial_lr: float = 0.025
    seed: int = 1
    unigram_power: float = 0.75
    deterministic: bool = True
    workers: int = 4  # fast mode only

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if self.negatives < 1:
            raise ValueError(f"negatives must be >= 1, got {self.negatives}")
        if self.initial_lr <= 0:
            raise ValueError(f"initial_lr must be > 0, got {self.initial_lr}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")


@dataclass(eq=False)
class EmbeddingMatrix:
    """V x D word-vector table with row labels in vocabulary-id order."""

    tokens: tuple[str, ...]
    vectors: np.ndarray
    deterministic: bool = True
    epoch_losses: list[float] = field(default_factory=list)

    def __post_init__(self):
        if self.vectors.shape[0] != len(self.tokens):
            raise DimensionMismatch(
                f"{len(self.tokens)} tokens but {self.vectors.shape[0]} vector rows"
            )
        if not np.isfinite(self.vectors).all():
            raise ValueError("embedding matrix contains non-finite entries")

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def content_hash(self) -> str:
        return tokens_hash(self.tokens)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity in [-1, 1]; exactly 0.0 if either vector has norm 0."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    norm_a = np.linalg.norm(a)
    norm_b = np.linalg.norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return float(np.dot(a, b) / (norm_a * norm_b))


def pair_loss(v_center: np.ndarray, u_context: np.ndarray, u_negatives: np.ndarray) -> float:
    """Negative-sampling loss for one (center, context) pair.

    -log sigmoid(u_o . v_c) - sum_k log sigmoid(-u_k . v_c)
    """
    s_pos = float(np.dot(u_context, v_center))
    s_neg = u_negatives @ v_center
    return float(-np.log(expit(s_pos)) - np.log(expit(-s_neg)).sum())


def pair_grads(
    v_center: np.ndarray, u_context: np.ndarray, u_negatives: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Analytic gradients of :func:`pair_loss` w.r.t. all three arguments."""
    f_pos = expit(float(np.dot(u_context, v_center)))
    f_neg = expit(u_negatives @ v_center)
    g_center = (f_pos - 1.0) * u_context + f_neg @ u_negatives
    g_context = (f_pos - 1.0) * v_center
    g_negatives = np.outer(f_neg, v_center)
    return g_center, g_context, g_negatives


class _NoiseTable:
    """Cumulative unigram^power table for negative sampling."""

    def __init__(self, counts: np.ndarray, power: float):
        weights = np.asarray(counts, dtype=np.float64) ** power
        total = weights.sum()
        if total <= 0:
            raise DegenerateCorpus("unigram table has zero mass")
        self.cum = np.cumsum(weights / total)
        self.cum[-1] = 1.0

    def draw(self, rng: np.random.Generator, k: int, exclude: int) -> np.ndarray:
        out = np.searchsorted(self.cum, rng.random(k), side="right")
        # redraw collisions with the positive word
        while True:
            mask = out == exclude
            n_bad = int(mask.sum())
            if n_bad == 0:
                return out
            out[mask] = np.searchsorted(self.cum, rng.random(n_bad), side="right")


def _train_pass(
    docs: list[np.ndarray],
    vin: np.ndarray,
    vout: np.ndarray,
    noise: _NoiseTable,
    config: SgnsConfig,
    rng: np.random.Generator,
    lr_state: dict,
) -> tuple[float, int]:
    """One pass over ``docs``; returns (summed pair loss, pair count)."""
    loss_sum = 0.0
    pairs = 0
    negatives = config.negatives
    labels = np.zeros(negatives + 1)
    labels[0] = 1.0
    for doc in docs:
        n = len(doc)
        for i in range(n):
            lr = max(
                MIN_LR,
                config.initial_lr * (1.0 - lr_state["done"] / lr_state["total"]),
            )
            lr_state["done"] += 1
            if n < 2:
                continue
            reach = int(rng.integers(1, config.window + 1))
            center = doc[i]
            for j in range(max(0, i - reach), min(n, i + reach + 1)):
                if j == i:
                    continue
                context = doc[j]
                idx = np.empty(negatives + 1, dtype=np.int64)
                idx[0] = context
                idx[1:] = noise.draw(rng, negatives, exclude=context)
                v = vin[center]
                outs = vout[idx]  # copy; input grad uses pre-update rows
                f = expit(outs @ v)
                g = (labels - f) * lr
                np.add.at(vout, idx, np.outer(g, v))
                vin[center] = v + g @ outs
                loss_sum += -np.log(max(f[0], 1e-12)) - np.log(
                    np.maximum(1.0 - f[1:], 1e-12)
                ).sum()
                pairs += 1
    return loss_sum, pairs


def train_sgns(
    documents: Sequence[Sequence[int]],
    vocab: Vocabulary,
    config: SgnsConfig | None = None,
) -> EmbeddingMatrix:
    """Train skip-gram negative-sampling vectors over token-id documents.

    Args:
        documents: token-id sequences (ids must be < len(vocab)).
        vocab: supplies row labels and unigram counts for the noise table.
        config: hyperparameters; defaults to :class:`SgnsConfig`.

    Returns:
        The input-side vectors as an :class:`EmbeddingMatrix` with per-epoch
        mean pair losses recorded.

    Raises:
        DegenerateCorpus: no document has two or more tokens.
    """
    config = config or SgnsConfig()
    docs = [np.asarray(d, dtype=np.int64) for d in documents]
    if not any(len(d) >= 2 for d in docs):
        raise DegenerateCorpus("need at least one document with >= 2 tokens")
    if len(vocab) < 2:
        raise DegenerateCorpus("negative sampling needs at least 2 vocabulary tokens")
    size = len(vocab)
    for d in docs:
        if len(d) and (d.min() < 0 or d.max() >= size):
            raise IndexError("document token id outside vocabulary")

    rng = np.random.default_rng(config.seed)
    vin = (rng.random((size, config.dim)) - 0.5) / config.dim
    vout = np.zeros((size, config.dim))
    noise = _NoiseTable(np.asarray(vocab.count), config.unigram_power)
    total_centers = sum(len(d) for d in docs) * config.epochs
    lr_state = {"done": 0, "total": total_centers}

    epoch_losses: list[float] = []
    for epoch in range(config.epochs):
        if config.deterministic:
            loss_sum, pairs = _train_pass(docs, vin, vout, noise, config, rng, lr_state)
        else:
            loss_sum, pairs = _train_fast_epoch(
                docs, vin, vout, noise, config, epoch, lr_state
            )
        mean_loss = loss_sum / max(pairs, 1)
        if not np.isfinite(mean_loss) or not np.isfinite(vin).all():
            raise NumericalError(f"non-finite loss or vectors at epoch {epoch + 1}")
        epoch_losses.append(mean_loss)
        logger.debug("sgns epoch %d/%d loss %.4f", epoch + 1, config.epochs, mean_loss)

    return EmbeddingMatrix(
        tokens=tuple(vocab.token_of_id),
        vectors=vin,
        deterministic=config.deterministic,
        epoch_losses=epoch_losses,
    )


def _train_fast_epoch(
    docs: list[np.ndarray],
    vin: np.ndarray,
    vout: np.ndarray,
    noise: _NoiseTable,
    config: SgnsConfig,
    epoch: int,
    lr_state: dict,
) -> tuple[float, int]:
    """Lock-free data-parallel pass: document shards race on shared rows."""
    shards = [docs[i :: config.workers] for i in range(config.workers)]
    shards = [s for s in shards if s]

    def run(shard_idx: int, shard: list[np.ndarray]) -> tuple[float, int]:
        shard_rng = np.random.default_rng(
            (config.seed, epoch, shard_idx)
        )
        # each shard tracks lr progress locally against the global schedule
        local_state = {"done": lr_state["done"], "total": lr_state["total"]}
        return _train_pass(shard, vin, vout, noise, config, shard_rng, local_state)

    with ThreadPoolExecutor(max_workers=len(shards)) as pool:
        results = list(pool.map(run, range(len(shards)), shards))
    lr_state["done"] += sum(len(d) for d in docs)
    return sum(r[0] for r in results), sum(r[1] for r in results)


# --- embedding files --------------------------------------------------------


def save_embeddings(matrix: EmbeddingMatrix, path: str | Path) -> None:
    """Write ``V D`` then ``token x1 .. xD`` rows at 9 significant digits."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(matrix)} {matrix.dim}\n")
        for token, row in zip(matrix.tokens, matrix.vectors):
            fh.write(token + " " + " ".join(f"{x:.9g}" for x in row) + "\n")


def load_embeddings(path: str | Path) -> EmbeddingMatrix:
    """Inverse of :func:`save_embeddings` within the textual precision."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ParseError("header must be 'V D'", 1)
        try:
            size, dim = int(header[0]), int(header[1])
        except ValueError as exc:
            raise ParseError("header must hold two integers", 1) from exc
        tokens: list[str] = []
        rows: list[np.ndarray] = []
        for line_no, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split(" ")
            if len(fields) != dim + 1:
                raise ParseError(
                    f"expected token plus {dim} values, got {len(fields) - 1}", line_no
                )
            try:
                row = np.asarray([float(x) for x in fields[1:]], dtype=np.float64)
            except ValueError as exc:
                raise ParseError("non-numeric vector entry", line_no) from exc
            if not np.isfinite(row).all():
                raise ParseError("non-finite vector entry", line_no)
            tokens.append(fields[0])
            rows.append(row)
    if len(tokens) != size:
        raise ParseError(f"header declares {size} rows, file holds {len(tokens)}")
    return EmbeddingMatrix(tokens=tuple(tokens), vectors=np.vstack(rows) if rows else np.zeros((0, dim)))
