#!/usr/bin/env python3
"""Build a ready-to-serve demo store: transcripts, config, trained artifacts.

Usage:
    python scripts/make_demo_store.py [--out demo_store] [--seed 23]

Afterwards:
    topicview serve --data-dir demo_store
"""

from __future__ import annotations

import argparse
import logging
import textwrap
from pathlib import Path

from topicview import synthetic
from topicview.corpus import (
    build_vocabulary,
    documents_from_sessions,
    save_transcripts,
    save_vocabulary,
    to_bow,
)
from topicview.embeddings import SgnsConfig, save_embeddings, train_sgns
from topicview.etm import EtmConfig, save_topic_model, train_etm

CONFIG_TEMPLATE = """\
[corpus]
transcripts = "transcripts.jsonl"
vocabulary = "vocab.txt"
min_count = 3
max_doc_ratio = 0.3
document_unit = "session"

[embeddings]
path = "embeddings.txt"
dim = 64
window = 5
negatives = 5
epochs = 8
seed = {seed}

[etm]
path = "model.json"
topics = 10
epochs = 100
batch_size = 16
seed = {seed}

[imagegen]
backend = "mock"
media_dir = "data"
max_chars = 1000

[server]
port = 8080
static_dir = "../frontend/dist"
"""


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("demo_store"))
    parser.add_argument("--seed", type=int, default=23)
    parser.add_argument("--sessions", type=int, default=8)
    parser.add_argument(
        "--with-reject-session",
        action="store_true",
        help="Include a session whose first image prompt gets safety-rejected.",
    )
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    log = logging.getLogger("make_demo_store")

    args.out.mkdir(parents=True, exist_ok=True)
    sessions = synthetic.demo_sessions(n_sessions=args.sessions, seed=args.seed)
    if args.with_reject_session:
        sessions.append(synthetic.rejection_demo_session())
    save_transcripts(sessions, args.out / "transcripts.jsonl")
    log.info("wrote %d sessions", len(sessions))

    docs = documents_from_sessions(sessions, "session")
    vocab = build_vocabulary(docs, min_count=3, max_doc_ratio=0.3)
    save_vocabulary(vocab, args.out / "vocab.txt")
    log.info("vocabulary: %d tokens", len(vocab))

    id_docs = [[vocab.id_of_token[t] for t in d if t in vocab.id_of_token] for d in docs]
    rho = train_sgns(id_docs, vocab, SgnsConfig(dim=64, epochs=8, seed=args.seed))
    save_embeddings(rho, args.out / "embeddings.txt")
    log.info("embeddings: %dx%d, final loss %.4f", len(rho), rho.dim, rho.epoch_losses[-1])

    bows = [to_bow(d, vocab) for d in docs]
    model = train_etm(
        bows, rho, EtmConfig(topics=10, epochs=100, batch_size=16, seed=args.seed)
    )
    save_topic_model(model, args.out / "model.json")
    elbos = model.train_meta["epoch_elbos"]
    log.info("model: K=%d, ELBO %.1f -> %.1f", model.k, elbos[0], elbos[-1])

    (args.out / "config.toml").write_text(CONFIG_TEMPLATE.format(seed=args.seed))
    log.info("store ready at %s; run: topicview serve --data-dir %s", args.out, args.out)


if __name__ == "__main__":
    main()
