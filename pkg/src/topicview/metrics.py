"""Topic quality metrics: pairwise coherence and top-word diversity."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from math import log
from pathlib import Path
from typing import Iterable, Sequence

from .errors import InsufficientTopWords
from .etm import TopicModel, top_words as model_top_words

DEFAULT_COHERENCE_TOP_N = 10
DEFAULT_DIVERSITY_TOP_N = 25


@dataclass
class EvalReport:
    model_name: str
    condition_tag: str | None
    coherence: float
    diversity: float
    top_n_coherence: int
    top_n_diversity: int
    reference_doc_count: int
    coherence_anomalies: int = 0  # pairs whose conditioning word never occurs


def _check_lists(top_word_lists: Sequence[Sequence[str]], n: int) -> None:
    for k, words in enumerate(top_word_lists):
        if len(words) < n:
            raise InsufficientTopWords(
                f"topic {k} has {len(words)} ranked words, need {n}"
            )


def coherence_with_anomalies(
    top_word_lists: Sequence[Sequence[str]],
    reference_docs: Sequence[Iterable[str]],
    n: int = DEFAULT_COHERENCE_TOP_N,
) -> tuple[float, int]:
    """Asymmetric smoothed-conditional-probability coherence plus anomaly tally.

    Per topic: (2 / (n (n-1))) * sum over ranked pairs i<j of
    log((D(w_i, w_j) + 1) / D(w_j)), where D counts reference documents
    containing the word(s). Pairs whose D(w_j) is 0 use 1 instead and are
    tallied. Returns the mean over topics.
    """
    _check_lists(top_word_lists, n)
    if not reference_docs:
        raise ValueError("reference_docs must be non-empty")
    doc_sets = [frozenset(doc) for doc in reference_docs]

    postings: dict[str, set[int]] = {}
    needed = {w for words in top_word_lists for w in words[:n]}
    for doc_id, doc in enumerate(doc_sets):
        for word in doc & needed:
            postings.setdefault(word, set()).add(doc_id)

    anomalies = 0
    topic_scores = []
    for words in top_word_lists:
        top = list(words[:n])
        total = 0.0
        for j in range(1, n):
            docs_j = postings.get(top[j], set())
            d_j = len(docs_j)
            if d_j == 0:
                d_j = 1
                anomalies += 1
            for i in range(j):
                d_ij = len(postings.get(top[i], set()) & docs_j)
                total += log((d_ij + 1) / d_j)
        topic_scores.append(2.0 * total / (n * (n - 1)))
    return sum(topic_scores) / len(topic_scores), anomalies


def topic_coherence(
    top_word_lists: Sequence[Sequence[str]],
    reference_docs: Sequence[Iterable[str]],
    n: int = DEFAULT_COHERENCE_TOP_N,
) -> float:
    return coherence_with_anomalies(top_word_lists, reference_docs, n)[0]


def topic_diversity(
    top_word_lists: Sequence[Sequence[str]], n: int = DEFAULT_DIVERSITY_TOP_N
) -> float:
    """Unique words across all top-n lists over the total n * K slots."""
    _check_lists(top_word_lists, n)
    unique = {w for words in top_word_lists for w in words[:n]}
    return len(unique) / (n * len(top_word_lists))


def evaluate(
    model: TopicModel,
    reference_docs: Sequence[Iterable[str]],
    model_name: str = "etm",
    condition_tag: str | None = None,
    n_coherence: int = DEFAULT_COHERENCE_TOP_N,
    n_diversity: int = DEFAULT_DIVERSITY_TOP_N,
) -> EvalReport:
    """Score a trained model's topics against reference documents."""
    ranked = model_top_words(model, min(max(n_coherence, n_diversity), model.vocab_size))
    coherence, anomalies = coherence_with_anomalies(ranked, reference_docs, n_coherence)
    diversity = topic_diversity(ranked, n_diversity)
    return EvalReport(
        model_name=model_name,
        condition_tag=condition_tag,
        coherence=coherence,
        diversity=diversity,
        top_n_coherence=n_coherence,
        top_n_diversity=n_diversity,
        reference_doc_count=len(reference_docs),
        coherence_anomalies=anomalies,
    )


def write_reports_csv(reports: Sequence[EvalReport], path: str | Path | io.TextIOBase) -> None:
    """CSV export: model, condition, coherence, diversity, n_coh, n_div, docs."""

    def write(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["model", "condition", "coherence", "diversity", "n_coh", "n_div", "docs"])
        for r in reports:
            writer.writerow(
                [
                    r.model_name,
                    r.condition_tag or "",
                    f"{r.coherence:.6f}",
                    f"{r.diversity:.6f}",
                    r.top_n_coherence,
                    r.top_n_diversity,
                    r.reference_doc_count,
                ]
            )

    if isinstance(path, (str, Path)):
        with Path(path).open("w", encoding="utf-8", newline="") as fh:
            write(fh)
    else:
        write(path)


def format_report_table(reports: Sequence[EvalReport]) -> str:
    """Human-readable per-model, per-condition TC/TD table."""
    conditions = []
    for r in reports:
        tag = r.condition_tag or "all"
        if tag not in conditions:
            conditions.append(tag)
    models = []
    for r in reports:
        if r.model_name not in models:
            models.append(r.model_name)
    cell: dict[tuple[str, str], EvalReport] = {
        (r.model_name, r.condition_tag or "all"): r for r in reports
    }

    header = ["model"] + [f"{c} TC | TD" for c in conditions]
    lines = ["  ".join(f"{h:>24}" for h in header)]
    for m in models:
        row = [f"{m:>24}"]
        for c in conditions:
            r = cell.get((m, c))
            row.append(
                f"{r.coherence:>11.3f} | {r.diversity:>8.3f}" if r else f"{'-':>24}"
            )
        lines.append("  ".join(row))
    return "\n".join(lines)
