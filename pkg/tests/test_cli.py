import csv
import json
import shutil
import textwrap

import numpy as np
import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from topicview.cli import main
from topicview.corpus import Session, Turn, save_transcripts
from topicview.service import create_app
from topicview.state import load_state


@pytest.fixture()
def runner():
    return CliRunner()


def tiny_config(root, etm_epochs=5):
    (root / "config.toml").write_text(
        textwrap.dedent(
            f"""\
            [corpus]
            transcripts = "transcripts.jsonl"
            vocabulary = "vocab.txt"
            min_count = 2
            max_doc_ratio = 1.0

            [embeddings]
            path = "embeddings.txt"
            dim = 8
            epochs = 2
            window = 2
            seed = 1

            [etm]
            path = "model.json"
            topics = 2
            epochs = {etm_epochs}
            batch_size = 4
            seed = 1
            hidden = 8
            """
        )
    )
    return root / "config.toml"


def tiny_sessions():
    texts = [
        "sleep rest calm quiet sleep rest",
        "work stress deadline work stress deadline",
        "calm rest sleep quiet calm rest",
        "stress work deadline stress work deadline",
    ]
    sessions = []
    for i, text in enumerate(texts):
        turns = tuple(
            Turn(f"tiny-{i}", j, "patient" if j % 2 == 0 else "therapist", text)
            for j in range(3)
        )
        sessions.append(Session(session_id=f"tiny-{i}", turns=turns))
    return sessions


class TestTrainingCommands:
    def test_full_pipeline(self, runner, tmp_path):
        config = tiny_config(tmp_path)
        save_transcripts(tiny_sessions(), tmp_path / "transcripts.jsonl")

        result = runner.invoke(main, ["train-embeddings", "--config", str(config)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "vocab.txt").exists()
        assert (tmp_path / "embeddings.txt").exists()

        result = runner.invoke(main, ["train-etm", "--config", str(config)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "model.json").exists()
        payload = json.loads((tmp_path / "model.json").read_text())
        assert payload["K"] == 2

        result = runner.invoke(
            main, ["score", "tiny-0", "--out", str(tmp_path / "scores.csv"), "--config", str(config)]
        )
        assert result.exit_code == 0, result.output
        rows = list(csv.reader((tmp_path / "scores.csv").open()))
        assert rows[0] == ["turn_index", "speaker", "topic_0", "topic_1"]
        assert len(rows) == 4  # header + 3 turns

    def test_ingest_merges_and_replaces(self, runner, tmp_path):
        config = tiny_config(tmp_path)
        sessions = tiny_sessions()
        save_transcripts(sessions[:2], tmp_path / "incoming_a.jsonl")
        save_transcripts(sessions[1:], tmp_path / "incoming_b.jsonl")

        result = runner.invoke(main, ["ingest", str(tmp_path / "incoming_a.jsonl"), "--config", str(config)])
        assert result.exit_code == 0, result.output
        assert "2 sessions" in result.output

        result = runner.invoke(main, ["ingest", str(tmp_path / "incoming_b.jsonl"), "--config", str(config)])
        assert result.exit_code == 0, result.output
        assert "store now holds 4" in result.output

    def test_ingest_rejects_bad_file(self, runner, tmp_path):
        config = tiny_config(tmp_path)
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"session_id": "s", "turn_index": 0, "speaker": "narrator", "text": "x"}\n')
        result = runner.invoke(main, ["ingest", str(bad), "--config", str(config)])
        assert result.exit_code != 0
        assert "speaker" in result.output


class TestCrossInterfaceEquivalence:
    def test_score_csv_equals_endpoint_matrix(self, runner, demo_store, tmp_path):
        config = demo_store / "config.toml"
        out = tmp_path / "scores.csv"
        result = runner.invoke(main, ["score", "session-000", "--out", str(out), "--config", str(config)])
        assert result.exit_code == 0, result.output

        state = load_state(config)
        client = TestClient(create_app(state))
        body = client.get("/api/sessions/session-000/scores").json()

        rows = list(csv.DictReader(out.open()))
        assert len(rows) == body["turn_count"]
        for csv_row, api_row in zip(rows, body["rows"]):
            assert int(csv_row["turn_index"]) == api_row["turn_index"]
            assert csv_row["speaker"] == api_row["speaker"]
            for k, value in enumerate(api_row["scores"]):
                assert abs(float(csv_row[f"topic_{k}"]) - value) <= 1e-6

    def test_topics_command_matches_endpoint(self, runner, demo_store):
        result = runner.invoke(main, ["topics", "--config", str(demo_store / "config.toml")])
        assert result.exit_code == 0, result.output

        state = load_state(demo_store / "config.toml")
        client = TestClient(create_app(state))
        body = client.get("/api/topics").json()

        lines = [l for l in result.output.strip().split("\n") if l.startswith("topic ")]
        assert len(lines) == body["topic_count"]
        for line, topic in zip(lines, body["topics"]):
            words = [pair.rsplit(":", 1)[0] for pair in line.split(": ", 1)[1].split(" ")]
            assert words == [w["word"] for w in topic["words"]]

    def test_eval_writes_report(self, runner, demo_store, tmp_path):
        out = tmp_path / "eval.csv"
        result = runner.invoke(
            main,
            ["eval", "--out", str(out), "--config", str(demo_store / "config.toml"),
             "--top-n-coherence", "5", "--top-n-diversity", "10"],
        )
        assert result.exit_code == 0, result.output
        rows = list(csv.DictReader(out.open()))
        assert rows[0]["model"] == "etm"
        assert rows[0]["condition"] == ""  # universal row first
        conditions = {r["condition"] for r in rows[1:]}
        assert conditions == {"anxiety", "depression", "schizophrenia"}
        for row in rows:
            float(row["coherence"])
            assert 0 < float(row["diversity"]) <= 1.0

    def test_score_unknown_session_fails(self, runner, demo_store, tmp_path):
        result = runner.invoke(
            main,
            ["score", "ghost", "--out", str(tmp_path / "x.csv"), "--config", str(demo_store / "config.toml")],
        )
        assert result.exit_code != 0
        assert "ghost" in result.output
