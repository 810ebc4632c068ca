"""Shared fixtures: the planted 2-topic pipeline and a full demo artifact store."""

from __future__ import annotations

import textwrap
from dataclasses import dataclass

import numpy as np
import pytest

from topicview import corpus as corpus_mod
from topicview import synthetic
from topicview.corpus import build_vocabulary, save_vocabulary, save_transcripts, to_bow
from topicview.embeddings import SgnsConfig, save_embeddings, train_sgns
from topicview.etm import EtmConfig, save_topic_model, train_etm


@dataclass
class PlantedPipeline:
    docs: list
    labels: list
    vocab: object
    id_docs: list
    bows: list
    rho: object
    model: object


@pytest.fixture(scope="session")
def planted() -> PlantedPipeline:
    """Vocabulary, embeddings, and 2-topic model trained on the planted corpus.

    Trained under the reference regime: 100 epochs at batch size 16.
    """
    docs, labels = synthetic.planted_documents(seed=7)
    # planted groups each cover half the documents, so the frequency-ratio cap
    # is disabled for this fixture; min_count stays at the default
    vocab = build_vocabulary(docs, min_count=3, max_doc_ratio=1.0)
    id_docs = [[vocab.id_of_token[t] for t in d if t in vocab.id_of_token] for d in docs]
    rho = train_sgns(id_docs, vocab, SgnsConfig(dim=16, epochs=5, seed=3))
    bows = [to_bow(d, vocab) for d in docs]
    model = train_etm(
        bows, rho, EtmConfig(topics=2, epochs=100, batch_size=16, seed=5, hidden=32)
    )
    return PlantedPipeline(
        docs=docs, labels=labels, vocab=vocab, id_docs=id_docs,
        bows=bows, rho=rho, model=model,
    )


@pytest.fixture(scope="session")
def demo_store(tmp_path_factory):
    """A complete on-disk artifact store with a K=10 model and config.toml."""
    root = tmp_path_factory.mktemp("store")
    sessions = synthetic.demo_sessions(seed=23)
    sessions.append(synthetic.rejection_demo_session())
    save_transcripts(sessions, root / "transcripts.jsonl")

    docs = corpus_mod.documents_from_sessions(sessions, "session")
    vocab = build_vocabulary(docs, min_count=3, max_doc_ratio=0.3)
    id_docs = [[vocab.id_of_token[t] for t in d if t in vocab.id_of_token] for d in docs]
    rho = train_sgns(id_docs, vocab, SgnsConfig(dim=32, epochs=2, window=3, seed=9))
    bows = [to_bow(d, vocab) for d in docs]
    model = train_etm(
        bows, rho, EtmConfig(topics=10, epochs=30, batch_size=16, seed=9, hidden=64)
    )

    save_vocabulary(vocab, root / "vocab.txt")
    save_embeddings(rho, root / "embeddings.txt")
    save_topic_model(model, root / "model.json")
    (root / "config.toml").write_text(
        textwrap.dedent(
            """\
            [corpus]
            transcripts = "transcripts.jsonl"
            vocabulary = "vocab.txt"
            min_count = 3
            max_doc_ratio = 0.3

            [embeddings]
            path = "embeddings.txt"
            dim = 32
            epochs = 2
            window = 3
            seed = 9

            [etm]
            path = "model.json"
            topics = 10
            epochs = 30
            seed = 9
            hidden = 64

            [imagegen]
            backend = "mock"
            media_dir = "data"

            [server]
            port = 8123
            """
        ),
        encoding="utf-8",
    )
    return root


def pytest_configure(config):
    config._acceptance_results = []


def pytest_runtest_makereport(item, call):
    if call.when != "call":
        return
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    label = marker.args[0] if marker.args else item.name
    item.config._acceptance_results.append((label, call.excinfo is None))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance_results", [])
    if not results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for label, ok in results:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {label}")
