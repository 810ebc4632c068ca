import json

import httpx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from topicview.errors import BackendUnreachable, RequestFailed, SafetyRejected, TransportError
from topicview.imagegen import (
    FAILED,
    GENERATED,
    REJECTED_SAFETY,
    Excerpt,
    HttpImageBackend,
    MockImageBackend,
    chunk_transcript,
    generate_images,
    load_outcomes,
    save_outcomes,
)


class TestChunkTranscript:
    def test_tiling_with_regular_spaces(self):
        words = ("word" + " ") * 500  # 2500 chars
        text = words[:2500]
        excerpts = chunk_transcript(text)
        assert len(excerpts) == 3
        assert "".join(e.text for e in excerpts) == text
        assert all(len(e.text) <= 1000 for e in excerpts)

    def test_exactly_1000_chars_single_excerpt(self):
        text = "x" * 1000
        excerpts = chunk_transcript(text)
        assert len(excerpts) == 1
        assert excerpts[0].text == text

    def test_1001_unbroken_chars_forced_cut(self):
        text = "y" * 1001
        excerpts = chunk_transcript(text)
        assert [len(e.text) for e in excerpts] == [1000, 1]

    def test_backs_up_to_whitespace(self):
        text = "aaaa bbbb " * 150  # 1500 chars
        excerpts = chunk_transcript(text, max_chars=100)
        for e in excerpts[:-1]:
            assert e.text.endswith(" ")  # cut lands after a space, not mid-word

    def test_offsets_are_code_point_based(self):
        text = "héllo wörld 🙂 " * 20
        excerpts = chunk_transcript(text, max_chars=50)
        for e in excerpts:
            assert text[e.char_start : e.char_end] == e.text

    def test_empty_text(self):
        assert chunk_transcript("") == []

    @given(st.text(max_size=3000))
    @settings(max_examples=200)
    def test_tiling_property(self, text):
        excerpts = chunk_transcript(text, max_chars=137)
        assert "".join(e.text for e in excerpts) == text
        assert sum(len(e.text) for e in excerpts) == len(text)
        assert all(len(e.text) <= 137 for e in excerpts)
        assert [e.ordinal for e in excerpts] == list(range(len(excerpts)))

    @given(
        st.lists(
            st.text(alphabet="abcdefg", min_size=1, max_size=10), min_size=1, max_size=400
        )
    )
    @settings(max_examples=100)
    def test_anti_fragmentation(self, words):
        # with every token <= max_chars/2, all but the last chunk stay > max_chars/2
        text = " ".join(words)
        max_chars = 24
        excerpts = chunk_transcript(text, max_chars=max_chars)
        for e in excerpts[:-1]:
            assert len(e.text) > max_chars / 2


class TestMockBackend:
    def test_deterministic_pixels(self):
        backend = MockImageBackend()
        first = backend.render("a calming meadow at dusk")
        second = backend.render("a calming meadow at dusk")
        assert first == second
        assert first[:8] == b"\x89PNG\r\n\x1a\n"
        assert backend.render("different text") != first

    def test_reject_marker(self):
        backend = MockImageBackend()
        with pytest.raises(SafetyRejected):
            backend.render("please REJECTME now")


class TestGenerateImages:
    def excerpts(self, texts, session_id="s1"):
        out = []
        pos = 0
        for i, t in enumerate(texts):
            out.append(Excerpt(session_id, i, pos, pos + len(t), t))
            pos += len(t)
        return out

    def test_mock_batch_generates_files(self, tmp_path):
        excerpts = self.excerpts(["calm morning", "afternoon walk", "evening rest"])
        outcomes = generate_images(excerpts, MockImageBackend(), tmp_path)
        assert [o.status for o in outcomes] == [GENERATED] * 3
        for o in outcomes:
            name = tmp_path / "s1" / "images" / f"s1_{o.ordinal}.png"
            assert str(name) == o.image_path
            assert name.exists()

    def test_rejection_does_not_abort_batch(self, tmp_path):
        excerpts = self.excerpts(["fine text", "bad REJECTME text", "more fine text"])
        outcomes = generate_images(excerpts, MockImageBackend(), tmp_path)
        assert [o.status for o in outcomes] == [GENERATED, REJECTED_SAFETY, GENERATED]
        assert outcomes[1].image_path is None
        assert outcomes[1].detail

    def test_rerun_is_idempotent(self, tmp_path):
        excerpts = self.excerpts(["one", "two"])
        generate_images(excerpts, MockImageBackend(), tmp_path)
        first = {
            p.name: p.read_bytes() for p in (tmp_path / "s1" / "images").glob("*.png")
        }
        generate_images(excerpts, MockImageBackend(), tmp_path)
        second = {
            p.name: p.read_bytes() for p in (tmp_path / "s1" / "images").glob("*.png")
        }
        assert first == second

    def test_regeneration_replaces_stale_files(self, tmp_path):
        generate_images(self.excerpts(["a", "b", "c"]), MockImageBackend(), tmp_path)
        outcomes = generate_images(self.excerpts(["a"]), MockImageBackend(), tmp_path)
        assert len(outcomes) == 1
        assert len(list((tmp_path / "s1" / "images").glob("*.png"))) == 1

    def test_all_transport_failures_raise(self, tmp_path):
        backend = MockImageBackend(fail_marker="FAIL")
        excerpts = self.excerpts(["FAIL one", "FAIL two"])
        with pytest.raises(BackendUnreachable):
            generate_images(excerpts, backend, tmp_path)

    def test_partial_transport_failure_is_an_outcome(self, tmp_path):
        backend = MockImageBackend(fail_marker="FAIL")
        excerpts = self.excerpts(["good", "FAIL bad"])
        outcomes = generate_images(excerpts, backend, tmp_path)
        assert [o.status for o in outcomes] == [GENERATED, FAILED]

    def test_outcome_store_round_trip(self, tmp_path):
        excerpts = self.excerpts(["alpha", "REJECTME"])
        outcomes = generate_images(excerpts, MockImageBackend(), tmp_path)
        path = tmp_path / "outcomes.json"
        save_outcomes(outcomes, path)
        assert load_outcomes(path) == outcomes
        assert load_outcomes(tmp_path / "missing.json") == []


# shape of a real content-policy rejection body from a hosted image API
POLICY_REJECTION_BODY = {
    "error": {
        "code": "content_policy_violation",
        "message": "Your request was rejected as a result of our safety system. "
        "Your prompt may contain text that is not allowed by our safety system.",
        "type": "invalid_request_error",
    }
}


class TestHttpBackend:
    def make_backend(self, handler):
        transport = httpx.MockTransport(handler)
        client = httpx.Client(transport=transport)
        return HttpImageBackend(url="https://imagegen.test/v1/images", token="tk", client=client)

    def test_b64_payload(self):
        png = MockImageBackend().render("sample")
        import base64

        def handler(request):
            assert json.loads(request.content)["prompt"] == "sample"
            assert request.headers["authorization"] == "Bearer tk"
            return httpx.Response(200, json={"b64": base64.b64encode(png).decode()})

        assert self.make_backend(handler).render("sample") == png

    def test_url_payload_fetches_image(self):
        png = MockImageBackend().render("two-step")

        def handler(request):
            if request.url.path == "/v1/images":
                return httpx.Response(200, json={"url": "https://imagegen.test/file.png"})
            return httpx.Response(200, content=png)

        assert self.make_backend(handler).render("two-step") == png

    def test_http_400_is_safety_rejection_with_detail(self):
        def handler(request):
            return httpx.Response(400, json=POLICY_REJECTION_BODY)

        with pytest.raises(SafetyRejected) as err:
            self.make_backend(handler).render("sensitive content")
        assert "content_policy_violation" in str(err.value)

    def test_other_errors_fail(self):
        def handler(request):
            return httpx.Response(500, text="boom")

        with pytest.raises(RequestFailed):
            self.make_backend(handler).render("x")

    def test_transport_error(self):
        def handler(request):
            raise httpx.ConnectError("refused")

        with pytest.raises(TransportError):
            self.make_backend(handler).render("x")

    def test_requires_endpoint(self, monkeypatch):
        monkeypatch.delenv("IMAGEGEN_URL", raising=False)
        with pytest.raises(ValueError):
            HttpImageBackend()

    def test_env_configuration(self, monkeypatch):
        monkeypatch.setenv("IMAGEGEN_URL", "https://imagegen.test/env")
        monkeypatch.setenv("IMAGEGEN_TOKEN", "envtoken")
        backend = HttpImageBackend()
        assert backend.url == "https://imagegen.test/env"
        assert backend.token == "envtoken"
