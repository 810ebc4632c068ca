"""Simplified embedded topic model.

Topics live in the word-embedding space: topic k is a vector alpha_k, and its
word distribution is beta_k = softmax(rho alpha_k^T) over the vocabulary.
Document-topic proportions follow a logistic normal whose mean and log
variance come from an amortized two-layer encoder; training maximizes the
ELBO by stochastic gradient ascent with adaptive-moment steps.

All forward/backward arithmetic is explicit numpy so the analytic gradients
can be checked against finite differences.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import BowVector
from .embeddings import EmbeddingMatrix
from .errors import ArtifactMismatch, DimensionMismatch, NumericalError, ParseError

logger = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 1
LOGLIK_FLOOR = 1e-12


@dataclass
class EtmConfig:
    topics: int = 10
    epochs: int = 100
    batch_size: int = 16
    lr: float = 5e-3
    seed: int = 1
    train_embeddings: bool = False
    hidden: int = 128
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999

    def __post_init__(self):
        if self.topics < 2:
            raise ValueError(f"topics must be >= 2, got {self.topics}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.lr <= 0:
            raise ValueError(f"lr must be > 0, got {self.lr}")


@dataclass(eq=False)
class EncoderParams:
    """Two ReLU layers feeding separate mean and log-variance heads."""

    w1: np.ndarray  # hidden x V
    b1: np.ndarray
    w2: np.ndarray  # hidden x hidden
    b2: np.ndarray
    w_mu: np.ndarray  # K x hidden
    b_mu: np.ndarray
    w_logvar: np.ndarray  # K x hidden
    b_logvar: np.ndarray

    def arrays(self) -> dict[str, np.ndarray]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def zeros(cls, vocab_size: int, hidden: int, topics: int) -> "EncoderParams":
        return cls(
            w1=np.zeros((hidden, vocab_size)),
            b1=np.zeros(hidden),
            w2=np.zeros((hidden, hidden)),
            b2=np.zeros(hidden),
            w_mu=np.zeros((topics, hidden)),
            b_mu=np.zeros(topics),
            w_logvar=np.zeros((topics, hidden)),
            b_logvar=np.zeros(topics),
        )

    @classmethod
    def init(
        cls, vocab_size: int, hidden: int, topics: int, rng: np.random.Generator
    ) -> "EncoderParams":
        def glorot(rows, cols):
            bound = np.sqrt(6.0 / (rows + cols))
            return rng.uniform(-bound, bound, size=(rows, cols))

        return cls(
            w1=glorot(hidden, vocab_size),
            b1=np.zeros(hidden),
            w2=glorot(hidden, hidden),
            b2=np.zeros(hidden),
            w_mu=glorot(topics, hidden),
            b_mu=np.zeros(topics),
            w_logvar=glorot(topics, hidden),
            b_logvar=np.zeros(topics),
        )


@dataclass(eq=False)
class EtmGradients:
    encoder: EncoderParams
    alpha: np.ndarray
    rho: np.ndarray | None = None


@dataclass(eq=False)
class TopicModel:
    """Trained topic embeddings plus the cached word distributions."""

    alpha: np.ndarray  # K x D
    rho: EmbeddingMatrix
    beta: np.ndarray  # K x V
    top_words: list[list[str]]
    train_meta: dict
    encoder: EncoderParams | None = None  # kept in memory, never serialized

    @property
    def k(self) -> int:
        return self.alpha.shape[0]

    @property
    def dim(self) -> int:
        return self.alpha.shape[1]

    @property
    def vocab_size(self) -> int:
        return self.beta.shape[1]


def _row_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def beta_from(alpha: np.ndarray, rho: np.ndarray | EmbeddingMatrix) -> np.ndarray:
    """Per-topic word distributions: row k is softmax over words of rho alpha_k."""
    rho_v = rho.vectors if isinstance(rho, EmbeddingMatrix) else np.asarray(rho)
    alpha = np.asarray(alpha)
    if alpha.shape[1] != rho_v.shape[1]:
        raise DimensionMismatch(
            f"alpha dim {alpha.shape[1]} != embedding dim {rho_v.shape[1]}"
        )
    return _row_softmax(alpha @ rho_v.T)


def encode(bow_norm: np.ndarray, params: EncoderParams) -> tuple[np.ndarray, np.ndarray]:
    """Map one normalized bag-of-words vector to (mu, logvar)."""
    x = np.asarray(bow_norm, dtype=np.float64)
    h1 = np.maximum(params.w1 @ x + params.b1, 0.0)
    h2 = np.maximum(params.w2 @ h1 + params.b2, 0.0)
    return params.w_mu @ h2 + params.b_mu, params.w_logvar @ h2 + params.b_logvar


def theta_from(mu: np.ndarray, logvar: np.ndarray, noise: np.ndarray) -> np.ndarray:
    """Reparameterized logistic normal: softmax(mu + exp(logvar/2) * noise)."""
    return _row_softmax(np.asarray(mu) + np.exp(0.5 * np.asarray(logvar)) * np.asarray(noise))


def _batch_counts(batch: Sequence[BowVector], vocab_size: int) -> np.ndarray:
    counts = np.zeros((len(batch), vocab_size))
    for i, bow in enumerate(batch):
        counts[i, bow.ids] = bow.counts
    return counts


def elbo_and_grads(
    batch: Sequence[BowVector],
    params: EncoderParams,
    alpha: np.ndarray,
    rho: np.ndarray | EmbeddingMatrix,
    noise_per_doc: np.ndarray,
    train_embeddings: bool = False,
) -> tuple[float, EtmGradients]:
    """ELBO of a batch and its analytic gradients (ascent direction).

    ELBO = sum_d sum_w count_dw log(theta_d . beta_:w) - KL(q_d || N(0, I)),
    with the log floored at 1e-12. Gradients cover the encoder, alpha, and
    (optionally) rho.

    Raises:
        NumericalError: the ELBO evaluated to NaN.
    """
    if len(batch) == 0:
        raise ValueError("batch must be non-empty")
    rho_v = rho.vectors if isinstance(rho, EmbeddingMatrix) else np.asarray(rho)
    vocab_size = rho_v.shape[0]
    counts = _batch_counts(batch, vocab_size)
    totals = counts.sum(axis=1, keepdims=True)
    x = np.divide(counts, totals, out=np.zeros_like(counts), where=totals > 0)
    eps = np.asarray(noise_per_doc, dtype=np.float64)

    # encoder forward
    h1 = np.maximum(x @ params.w1.T + params.b1, 0.0)
    h2 = np.maximum(h1 @ params.w2.T + params.b2, 0.0)
    mu = h2 @ params.w_mu.T + params.b_mu
    logvar = h2 @ params.w_logvar.T + params.b_logvar
    sigma = np.exp(0.5 * logvar)
    z = mu + sigma * eps
    theta = _row_softmax(z)

    beta = beta_from(alpha, rho_v)
    mix = theta @ beta  # B x V word probabilities
    mix_floored = np.maximum(mix, LOGLIK_FLOOR)
    recon = float((counts * np.log(mix_floored)).sum())

    kl_per_doc = -0.5 * (1.0 + logvar - mu**2 - np.exp(logvar)).sum(axis=1)
    if (kl_per_doc < -1e-9).any():
        raise NumericalError("negative KL term; encoder outputs are corrupt")
    kl = float(kl_per_doc.sum())
    elbo = recon - kl
    if np.isnan(elbo):
        raise NumericalError("ELBO is NaN; lower the learning rate")

    # reconstruction backward
    g_mix = np.where(mix >= LOGLIK_FLOOR, counts / mix_floored, 0.0)
    g_theta = g_mix @ beta.T
    g_beta = theta.T @ g_mix
    g_z = theta * (g_theta - (g_theta * theta).sum(axis=1, keepdims=True))

    # add KL gradients: d elbo / d mu = g_z - mu, d elbo / d logvar as below
    g_mu = g_z - mu
    g_logvar = g_z * eps * 0.5 * sigma + 0.5 * (1.0 - np.exp(logvar))

    # encoder backward
    g_h2 = g_mu @ params.w_mu + g_logvar @ params.w_logvar
    g_h2 = g_h2 * (h2 > 0)
    g_h1 = g_h2 @ params.w2
    g_h1 = g_h1 * (h1 > 0)
    enc_grads = EncoderParams(
        w1=g_h1.T @ x,
        b1=g_h1.sum(axis=0),
        w2=g_h2.T @ h1,
        b2=g_h2.sum(axis=0),
        w_mu=g_mu.T @ h2,
        b_mu=g_mu.sum(axis=0),
        w_logvar=g_logvar.T @ h2,
        b_logvar=g_logvar.sum(axis=0),
    )

    # softmax-over-vocabulary backward into alpha (and rho when unfrozen)
    g_logits = beta * (g_beta - (g_beta * beta).sum(axis=1, keepdims=True))
    g_alpha = g_logits @ rho_v
    g_rho = g_logits.T @ np.asarray(alpha) if train_embeddings else None

    return elbo, EtmGradients(encoder=enc_grads, alpha=g_alpha, rho=g_rho)


class _Adam:
    def __init__(self, lr: float, beta1: float, beta2: float, eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}
        self.t = 0

    def step(self, tensors: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        """Ascent step: tensors move along the given gradients."""
        self.t += 1
        correction1 = 1.0 - self.beta1**self.t
        correction2 = 1.0 - self.beta2**self.t
        for name, grad in grads.items():
            if grad is None:
                continue
            m = self.m.setdefault(name, np.zeros_like(grad))
            v = self.v.setdefault(name, np.zeros_like(grad))
            m += (1.0 - self.beta1) * (grad - m)
            v += (1.0 - self.beta2) * (grad**2 - v)
            tensors[name] += self.lr * (m / correction1) / (
                np.sqrt(v / correction2) + self.eps
            )


def train_etm(
    corpus: Sequence[BowVector],
    rho: EmbeddingMatrix,
    config: EtmConfig | None = None,
) -> TopicModel:
    """Fit the model on bag-of-words documents over a fixed embedding matrix.

    Batches are shuffled per epoch with the seeded generator, the last
    partial batch is kept, and the per-epoch mean ELBO per document is
    recorded in ``train_meta["epoch_elbos"]``. With a fixed seed the run is
    bit-reproducible.

    Raises:
        NumericalError: divergence, with epoch/batch context.
    """
    config = config or EtmConfig()
    corpus = list(corpus)
    if not corpus:
        raise ValueError("corpus must be non-empty")
    vocab_size = len(rho)
    rng = np.random.default_rng(config.seed)
    params = EncoderParams.init(vocab_size, config.hidden, config.topics, rng)
    alpha = rng.normal(0.0, 0.1, size=(config.topics, rho.dim))

    tensors = params.arrays()
    tensors["alpha"] = alpha
    if config.train_embeddings:
        tensors["rho"] = rho.vectors
    optimizer = _Adam(config.lr, config.adam_beta1, config.adam_beta2)

    epoch_elbos: list[float] = []
    for epoch in range(config.epochs):
        order = rng.permutation(len(corpus))
        epoch_elbo = 0.0
        for start in range(0, len(corpus), config.batch_size):
            batch_ids = order[start : start + config.batch_size]
            batch = [corpus[i] for i in batch_ids]
            eps = rng.standard_normal((len(batch), config.topics))
            try:
                elbo, grads = elbo_and_grads(
                    batch, params, alpha, rho.vectors, eps,
                    train_embeddings=config.train_embeddings,
                )
            except NumericalError as exc:
                raise NumericalError(
                    f"epoch {epoch + 1}, batch at doc {start}: {exc}"
                ) from exc
            grad_map = grads.encoder.arrays()
            grad_map["alpha"] = grads.alpha
            if config.train_embeddings and grads.rho is not None:
                grad_map["rho"] = grads.rho
            optimizer.step(tensors, grad_map)
            epoch_elbo += elbo
        beta = beta_from(alpha, rho.vectors)
        row_sums = beta.sum(axis=1)
        if not np.allclose(row_sums, 1.0, atol=1e-6):
            raise NumericalError(f"epoch {epoch + 1}: beta rows do not sum to 1")
        epoch_elbos.append(epoch_elbo / len(corpus))
        logger.debug(
            "etm epoch %d/%d mean elbo %.3f", epoch + 1, config.epochs, epoch_elbos[-1]
        )

    beta = beta_from(alpha, rho.vectors)
    model = TopicModel(
        alpha=alpha,
        rho=rho,
        beta=beta,
        top_words=[],
        train_meta={
            "config": {
                "topics": config.topics,
                "epochs": config.epochs,
                "batch_size": config.batch_size,
                "lr": config.lr,
                "seed": config.seed,
                "train_embeddings": config.train_embeddings,
                "hidden": config.hidden,
            },
            "seed": config.seed,
            "epoch_elbos": epoch_elbos,
            "vocab_hash": rho.content_hash(),
            "deterministic": rho.deterministic,
        },
        encoder=params,
    )
    model.top_words = top_words(model, min(10, vocab_size))
    return model


def top_words(model: TopicModel, n: int) -> list[list[str]]:
    """Per topic, the n highest-beta tokens; ties broken by token id."""
    if n > model.vocab_size:
        raise ValueError(f"n={n} exceeds vocabulary size {model.vocab_size}")
    ranked = []
    for k in range(model.k):
        order = np.argsort(-model.beta[k], kind="stable")[:n]
        ranked.append([model.rho.tokens[i] for i in order])
    return ranked


def topic_word_weights(
    model: TopicModel, n: int = 10
) -> list[list[tuple[str, float]]]:
    """Per topic, the top-n (token, beta) pairs in descending weight order."""
    n = min(n, model.vocab_size)
    out = []
    for k in range(model.k):
        order = np.argsort(-model.beta[k], kind="stable")[:n]
        out.append([(model.rho.tokens[i], float(model.beta[k, i])) for i in order])
    return out


# --- model files -------------------------------------------------------------


def save_topic_model(model: TopicModel, path: str | Path) -> None:
    """JSON container with alpha only; beta is recomputed on load."""
    payload = {
        "version": MODEL_FORMAT_VERSION,
        "K": model.k,
        "D": model.dim,
        "alpha": model.alpha.tolist(),
        "vocab_hash": model.train_meta.get("vocab_hash"),
        "train_meta": {k: v for k, v in model.train_meta.items() if k != "vocab_hash"},
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_topic_model(path: str | Path, rho: EmbeddingMatrix) -> TopicModel:
    """Rebuild a model against ``rho``, verifying the stored vocabulary hash.

    Raises:
        ParseError: malformed container.
        ArtifactMismatch: ``rho`` does not match the training vocabulary.
    """
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid model JSON: {exc.msg}") from exc
    for key in ("version", "K", "D", "alpha", "vocab_hash"):
        if key not in payload:
            raise ParseError(f"model file missing key {key!r}")
    if payload["vocab_hash"] != rho.content_hash():
        raise ArtifactMismatch(
            "model was trained against a different vocabulary than these embeddings"
        )
    alpha = np.asarray(payload["alpha"], dtype=np.float64)
    if alpha.shape != (payload["K"], payload["D"]):
        raise ParseError("alpha shape disagrees with K and D")
    if alpha.shape[1] != rho.dim:
        raise ArtifactMismatch(
            f"model dim {alpha.shape[1]} != embedding dim {rho.dim}"
        )
    train_meta = dict(payload.get("train_meta", {}))
    train_meta["vocab_hash"] = payload["vocab_hash"]
    model = TopicModel(
        alpha=alpha,
        rho=rho,
        beta=beta_from(alpha, rho.vectors),
        top_words=[],
        train_meta=train_meta,
    )
    model.top_words = top_words(model, min(10, model.vocab_size))
    return model
