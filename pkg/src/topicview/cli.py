"""topicview command line: ingest, train, score, evaluate, serve."""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from . import corpus as corpus_mod
from . import embeddings as emb_mod
from . import etm as etm_mod
from . import metrics as metrics_mod
from . import temporal as temporal_mod
from .config import load_config
from .errors import TopicViewError
from .state import load_state

logger = logging.getLogger(__name__)

CONFIG_OPTION = click.option(
    "--config",
    "config_path",
    type=click.Path(path_type=Path),
    default=Path("config.toml"),
    show_default=True,
    help="TOML config file; relative artifact paths resolve against its directory.",
)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _fail(exc: Exception) -> None:
    raise click.ClickException(str(exc))


def _load_docs(config):
    sessions = corpus_mod.load_transcripts(config.resolve(config.corpus.transcripts))
    docs = corpus_mod.documents_from_sessions(sessions, config.corpus.document_unit)
    return sessions, docs


@main.command()
@click.argument("jsonl", type=click.Path(exists=True, path_type=Path))
@CONFIG_OPTION
def ingest(jsonl: Path, config_path: Path):
    """Validate a transcript file and merge it into the store.

    Sessions with ids already in the store are replaced.
    """
    try:
        config = load_config(config_path)
        incoming = corpus_mod.load_transcripts(jsonl)
        store_path = config.resolve(config.corpus.transcripts)
        existing = (
            corpus_mod.load_transcripts(store_path) if store_path.exists() else []
        )
        merged = {s.session_id: s for s in existing}
        replaced = sum(1 for s in incoming if s.session_id in merged)
        merged.update({s.session_id: s for s in incoming})
        store_path.parent.mkdir(parents=True, exist_ok=True)
        corpus_mod.save_transcripts(list(merged.values()), store_path)
    except TopicViewError as exc:
        _fail(exc)
    click.echo(
        f"ingested {len(incoming)} sessions ({replaced} replaced); "
        f"store now holds {len(merged)}"
    )


@main.command("train-embeddings")
@CONFIG_OPTION
def train_embeddings(config_path: Path):
    """Build the vocabulary and train word vectors over the store."""
    try:
        config = load_config(config_path)
        _, docs = _load_docs(config)
        vocab = corpus_mod.build_vocabulary(
            docs, config.corpus.min_count, config.corpus.max_doc_ratio
        )
        id_docs = [
            [vocab.id_of_token[t] for t in doc if t in vocab.id_of_token]
            for doc in docs
        ]
        matrix = emb_mod.train_sgns(id_docs, vocab, config.sgns)
        corpus_mod.save_vocabulary(vocab, config.resolve(config.corpus.vocabulary))
        emb_mod.save_embeddings(matrix, config.resolve(config.embeddings_path))
    except TopicViewError as exc:
        _fail(exc)
    click.echo(
        f"vocabulary: {len(vocab)} tokens over {vocab.total_docs} documents; "
        f"embeddings: {len(matrix)}x{matrix.dim}, "
        f"final epoch loss {matrix.epoch_losses[-1]:.4f}"
    )


@main.command("train-etm")
@CONFIG_OPTION
def train_etm(config_path: Path):
    """Train the topic model over the stored vocabulary and embeddings."""
    try:
        config = load_config(config_path)
        vocab = corpus_mod.load_vocabulary(config.resolve(config.corpus.vocabulary))
        rho = emb_mod.load_embeddings(config.resolve(config.embeddings_path))
        _, docs = _load_docs(config)
        bows = [corpus_mod.to_bow(doc, vocab) for doc in docs]
        model = etm_mod.train_etm(bows, rho, config.etm)
        etm_mod.save_topic_model(model, config.resolve(config.model_path))
    except TopicViewError as exc:
        _fail(exc)
    elbos = model.train_meta["epoch_elbos"]
    click.echo(
        f"model: K={model.k}, D={model.dim}, V={model.vocab_size}; "
        f"mean ELBO {elbos[0]:.2f} -> {elbos[-1]:.2f} over {len(elbos)} epochs"
    )


@main.command()
@click.argument("session_id")
@click.option("--out", type=click.Path(path_type=Path), required=True)
@CONFIG_OPTION
def score(session_id: str, out: Path, config_path: Path):
    """Write the per-turn topic score matrix of one session as CSV."""
    try:
        state = load_state(config_path)
        if state.get_session(session_id) is None:
            raise click.ClickException(f"unknown session {session_id!r}")
        series = state.get_scores(session_id)
        temporal_mod.write_scores_csv(series, out)
    except TopicViewError as exc:
        _fail(exc)
    click.echo(f"wrote {len(series)}x{series.topic_count} score matrix to {out}")


@main.command("eval")
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--top-n-coherence", default=metrics_mod.DEFAULT_COHERENCE_TOP_N, show_default=True)
@click.option("--top-n-diversity", default=metrics_mod.DEFAULT_DIVERSITY_TOP_N, show_default=True)
@CONFIG_OPTION
def eval_command(out: Path, top_n_coherence: int, top_n_diversity: int, config_path: Path):
    """Evaluate topic coherence and diversity against the training corpus."""
    try:
        state = load_state(config_path)
        sessions = list(state.sessions.values())
        docs = corpus_mod.documents_from_sessions(
            sessions, state.config.corpus.document_unit
        )
        reports = [
            metrics_mod.evaluate(
                state.model,
                docs,
                model_name="etm",
                n_coherence=top_n_coherence,
                n_diversity=top_n_diversity,
            )
        ]
        by_condition: dict[str, list] = {}
        for s in sessions:
            if s.condition_tag:
                by_condition.setdefault(s.condition_tag, []).append(s)
        for tag, tagged_sessions in sorted(by_condition.items()):
            tag_docs = corpus_mod.documents_from_sessions(
                tagged_sessions, state.config.corpus.document_unit
            )
            reports.append(
                metrics_mod.evaluate(
                    state.model,
                    tag_docs,
                    model_name="etm",
                    condition_tag=tag,
                    n_coherence=top_n_coherence,
                    n_diversity=top_n_diversity,
                )
            )
        metrics_mod.write_reports_csv(reports, out)
    except TopicViewError as exc:
        _fail(exc)
    click.echo(metrics_mod.format_report_table(reports))
    click.echo(f"wrote {len(reports)} report rows to {out}")


@main.command()
@CONFIG_OPTION
def topics(config_path: Path):
    """Print each topic's top-10 words with their weights."""
    try:
        state = load_state(config_path)
    except TopicViewError as exc:
        _fail(exc)
    for k, pairs in enumerate(etm_mod.topic_word_weights(state.model)):
        rendered = " ".join(f"{w}:{b:.4f}" for w, b in pairs)
        click.echo(f"topic {k}: {rendered}")


@main.command()
@click.option("--port", default=None, type=int, help="Overrides [server].port.")
@click.option(
    "--data-dir",
    type=click.Path(path_type=Path),
    default=None,
    help="Store directory holding config.toml; alternative to --config.",
)
@click.option("--host", default="127.0.0.1", show_default=True)
@CONFIG_OPTION
def serve(port: int | None, data_dir: Path | None, host: str, config_path: Path):
    """Run the HTTP service over the stored artifacts."""
    import uvicorn

    from .service import create_app

    if data_dir is not None:
        config_path = data_dir / "config.toml"
    try:
        state = load_state(config_path)
    except TopicViewError as exc:
        _fail(exc)
    app = create_app(state)
    uvicorn.run(app, host=host, port=port or state.config.server.port)


if __name__ == "__main__":
    main()
