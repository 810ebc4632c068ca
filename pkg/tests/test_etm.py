import numpy as np
import pytest
from hypothesis import given, strategies as st

from topicview.corpus import BowVector
from topicview.embeddings import EmbeddingMatrix
from topicview.errors import ArtifactMismatch, DimensionMismatch, NumericalError
from topicview.etm import (
    EncoderParams,
    EtmConfig,
    beta_from,
    elbo_and_grads,
    encode,
    load_topic_model,
    save_topic_model,
    theta_from,
    top_words,
    topic_word_weights,
    train_etm,
)
from topicview.synthetic import GROUP_A, GROUP_B

from .oracles import softmax_extended


def bow(ids, counts):
    return BowVector(
        ids=np.asarray(ids, dtype=np.int64), counts=np.asarray(counts, dtype=np.int64)
    )


def random_instance(seed, vocab_size=12, topics=3, dim=4, hidden=6, batch=3):
    rng = np.random.default_rng(seed)
    params = EncoderParams.init(vocab_size, hidden, topics, rng)
    # bias nudges keep ReLU units alive so finite differences stay smooth
    params.b1 += 0.1
    params.b2 += 0.1
    alpha = rng.normal(0, 0.5, (topics, dim))
    rho = rng.normal(0, 0.5, (vocab_size, dim))
    docs = []
    for _ in range(batch):
        nnz = int(rng.integers(2, 6))
        ids = np.sort(rng.choice(vocab_size, size=nnz, replace=False))
        docs.append(bow(ids, rng.integers(1, 5, size=nnz)))
    noise = rng.standard_normal((batch, topics))
    return params, alpha, rho, docs, noise


class TestBetaFrom:
    def test_zero_row_is_uniform(self):
        alpha = np.zeros((2, 3))
        rho = np.random.default_rng(0).normal(0, 1, (7, 3))
        beta = beta_from(alpha, rho)
        np.testing.assert_allclose(beta, np.full((2, 7), 1.0 / 7.0))

    def test_shift_invariance(self):
        rng = np.random.default_rng(1)
        alpha = rng.normal(0, 1, (3, 4))
        rho = rng.normal(0, 1, (9, 4))
        beta = beta_from(alpha, rho)
        # adding a constant to every logit of a row = shifting via rho offset
        logits = alpha @ rho.T + 11.5
        exp = np.exp(logits - logits.max(axis=1, keepdims=True))
        shifted = exp / exp.sum(axis=1, keepdims=True)
        np.testing.assert_allclose(beta, shifted, atol=1e-12)

    def test_matches_extended_precision_oracle(self):
        rng = np.random.default_rng(2)
        alpha = rng.normal(0, 2, (3, 4))
        rho = rng.normal(0, 2, (5, 4))
        beta = beta_from(alpha, rho)
        expected = softmax_extended(alpha @ rho.T)
        np.testing.assert_allclose(beta, expected, atol=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            beta_from(np.zeros((2, 3)), np.zeros((5, 4)))

    def test_rows_are_distributions(self):
        rng = np.random.default_rng(3)
        beta = beta_from(rng.normal(0, 3, (4, 8)), rng.normal(0, 3, (30, 8)))
        assert (beta >= 0).all()
        np.testing.assert_allclose(beta.sum(axis=1), 1.0, atol=1e-9)


class TestEncode:
    def test_zero_params_give_zero_outputs(self):
        params = EncoderParams.zeros(vocab_size=6, hidden=4, topics=3)
        mu, logvar = encode(np.full(6, 1.0 / 6.0), params)
        assert (mu == 0).all() and (logvar == 0).all()

    def test_deterministic(self):
        rng = np.random.default_rng(4)
        params = EncoderParams.init(6, 4, 3, rng)
        x = rng.random(6)
        x = x / x.sum()
        first = encode(x, params)
        second = encode(x, params)
        np.testing.assert_array_equal(first[0], second[0])
        np.testing.assert_array_equal(first[1], second[1])

    def test_matches_manual_arithmetic(self):
        rng = np.random.default_rng(5)
        params = EncoderParams.init(6, 4, 3, rng)
        x = rng.random(6)
        x = x / x.sum()
        h1 = np.maximum(params.w1 @ x + params.b1, 0)
        h2 = np.maximum(params.w2 @ h1 + params.b2, 0)
        mu, logvar = encode(x, params)
        np.testing.assert_allclose(mu, params.w_mu @ h2 + params.b_mu, atol=1e-10)
        np.testing.assert_allclose(
            logvar, params.w_logvar @ h2 + params.b_logvar, atol=1e-10
        )


class TestThetaFrom:
    def test_zero_mu_zero_noise_uniform(self):
        theta = theta_from(np.zeros(4), np.array([0.3, -2.0, 1.0, 0.0]), np.zeros(4))
        np.testing.assert_allclose(theta, 0.25)

    @given(st.integers(0, 2**31 - 1))
    def test_simplex(self, seed):
        rng = np.random.default_rng(seed)
        theta = theta_from(rng.normal(0, 3, 5), rng.normal(0, 2, 5), rng.standard_normal(5))
        assert theta.sum() == pytest.approx(1.0, abs=1e-9)
        assert (theta >= 0).all()

    def test_matches_independent_sampler(self):
        mu = np.array([0.5, -0.5, 1.0])
        logvar = np.array([0.2, -1.0, 0.0])
        draws = np.random.default_rng(6).standard_normal((1000, 3))
        ours = np.vstack([theta_from(mu, logvar, eps) for eps in draws])
        z = mu + np.exp(0.5 * logvar) * draws  # same formula, written separately
        exp = np.exp(z)
        reference = exp / exp.sum(axis=1, keepdims=True)
        np.testing.assert_allclose(ours, reference, atol=1e-12)


class TestElboAndGrads:
    def test_k1_collapses_to_hand_formula(self):
        # with a single topic theta = 1 and the mixture is beta itself
        rng = np.random.default_rng(7)
        vocab_size, dim = 8, 3
        params = EncoderParams.init(vocab_size, 4, 1, rng)
        alpha = rng.normal(0, 1, (1, dim))
        rho = rng.normal(0, 1, (vocab_size, dim))
        doc = bow([1, 4, 5], [2, 1, 3])
        noise = rng.standard_normal((1, 1))

        elbo, _ = elbo_and_grads([doc], params, alpha, rho, noise)

        beta = beta_from(alpha, rho)[0]
        x = doc.dense(vocab_size) / doc.total
        mu, logvar = encode(x, params)
        recon = sum(c * np.log(beta[i]) for i, c in doc)
        kl = -0.5 * float((1 + logvar - mu**2 - np.exp(logvar)).sum())
        assert elbo == pytest.approx(recon - kl, abs=1e-8)

    @pytest.mark.parametrize("seed", range(4))
    def test_gradients_match_finite_differences(self, seed):
        params, alpha, rho, docs, noise = random_instance(seed)
        _, grads = elbo_and_grads(docs, params, alpha, rho, noise, train_embeddings=True)
        tensors = params.arrays()
        tensors["alpha"] = alpha
        tensors["rho"] = rho
        grad_map = grads.encoder.arrays()
        grad_map["alpha"] = grads.alpha
        grad_map["rho"] = grads.rho

        h = 1e-5
        pick = np.random.default_rng(seed + 100)
        for name, tensor in tensors.items():
            flat = tensor.ravel()
            grad_flat = grad_map[name].ravel()
            for i in pick.choice(flat.size, size=min(10, flat.size), replace=False):
                original = flat[i]
                flat[i] = original + h
                up, _ = elbo_and_grads(docs, params, alpha, rho, noise)
                flat[i] = original - h
                down, _ = elbo_and_grads(docs, params, alpha, rho, noise)
                flat[i] = original
                fd = (up - down) / (2 * h)
                denom = max(abs(grad_flat[i]), abs(fd))
                if denom > 1e-7:
                    assert abs(grad_flat[i] - fd) / denom < 1e-4, f"{name}[{i}]"

    def test_duplicated_document_adds_its_own_term(self):
        params, alpha, rho, docs, noise = random_instance(11)
        base_noise = noise
        elbo_base, _ = elbo_and_grads(docs, params, alpha, rho, base_noise)
        dup = docs + [docs[0]]
        dup_noise = np.vstack([base_noise, base_noise[0]])
        elbo_dup, _ = elbo_and_grads(dup, params, alpha, rho, dup_noise)
        single, _ = elbo_and_grads([docs[0]], params, alpha, rho, base_noise[:1])
        assert elbo_dup - elbo_base == pytest.approx(single, abs=1e-8)

    def test_kl_non_negative(self):
        for seed in range(5):
            params, alpha, rho, docs, noise = random_instance(seed)
            x = docs[0].dense(12) / docs[0].total
            mu, logvar = encode(x, params)
            kl = -0.5 * float((1 + logvar - mu**2 - np.exp(logvar)).sum())
            assert kl >= -1e-12

    def test_empty_batch_rejected(self):
        params, alpha, rho, _, _ = random_instance(0)
        with pytest.raises(ValueError):
            elbo_and_grads([], params, alpha, rho, np.zeros((0, 3)))


class TestTrainEtm:
    def test_config_validation(self):
        with pytest.raises(ValueError):
            EtmConfig(epochs=0)
        with pytest.raises(ValueError):
            EtmConfig(batch_size=0)
        with pytest.raises(ValueError):
            EtmConfig(topics=1)

    def test_planted_recovery(self, planted):
        tops = top_words(planted.model, 10)
        group_a, group_b = set(GROUP_A), set(GROUP_B)
        dominant = []
        for words in tops:
            overlap_a = len([w for w in words if w in group_a])
            overlap_b = len([w for w in words if w in group_b])
            purity = max(overlap_a, overlap_b) / 10.0
            assert purity >= 0.8
            dominant.append("a" if overlap_a > overlap_b else "b")
        assert set(dominant) == {"a", "b"}  # topics map to distinct groups

    def test_training_curve_improves(self, planted):
        elbos = planted.model.train_meta["epoch_elbos"]
        assert len(elbos) == 100
        assert np.mean(elbos[-10:]) > np.mean(elbos[:10])

    def test_beta_rows_sum_to_one(self, planted):
        np.testing.assert_allclose(planted.model.beta.sum(axis=1), 1.0, atol=1e-6)
        assert (planted.model.beta >= 0).all()

    def test_seeded_determinism(self, planted):
        config = EtmConfig(topics=2, epochs=5, batch_size=16, seed=5, hidden=32)
        m1 = train_etm(planted.bows, planted.rho, config)
        m2 = train_etm(planted.bows, planted.rho, config)
        assert (m1.beta == m2.beta).all()

    def test_partial_batches_allowed(self, planted):
        config = EtmConfig(topics=2, epochs=2, batch_size=16, seed=0, hidden=16)
        model = train_etm(planted.bows[:7], planted.rho, config)  # 7 docs < batch_size
        assert model.k == 2


class TestTopWords:
    def test_one_hot_beta(self, planted):
        model = planted.model
        k = model.k - 1
        hot = np.full_like(model.beta, 1e-12)
        hot[:, :] = 1e-9
        hot[k, 3] = 1.0
        saved = model.beta
        model.beta = hot / hot.sum(axis=1, keepdims=True)
        try:
            assert top_words(model, 1)[k][0] == model.rho.tokens[3]
        finally:
            model.beta = saved

    def test_full_vocab_is_permutation(self, planted):
        model = planted.model
        lists = top_words(model, model.vocab_size)
        for words in lists:
            assert sorted(words) == sorted(model.rho.tokens)

    def test_matches_sort_oracle(self, planted):
        model = planted.model
        n = 7
        for k, words in enumerate(top_words(model, n)):
            ranked = sorted(
                range(model.vocab_size), key=lambda i: (-model.beta[k, i], i)
            )[:n]
            assert words == [model.rho.tokens[i] for i in ranked]

    def test_weights_descend(self, planted):
        for pairs in topic_word_weights(planted.model):
            weights = [w for _, w in pairs]
            assert weights == sorted(weights, reverse=True)
            assert sum(weights) <= 1.0 + 1e-9


class TestModelFiles:
    def test_round_trip(self, planted, tmp_path):
        path = tmp_path / "model.json"
        save_topic_model(planted.model, path)
        loaded = load_topic_model(path, planted.rho)
        np.testing.assert_allclose(loaded.alpha, planted.model.alpha, atol=0)
        np.testing.assert_allclose(loaded.beta, planted.model.beta, atol=1e-12)
        assert loaded.top_words == planted.model.top_words
        assert loaded.train_meta["vocab_hash"] == planted.model.train_meta["vocab_hash"]

    def test_wrong_vocabulary_rejected(self, planted, tmp_path):
        path = tmp_path / "model.json"
        save_topic_model(planted.model, path)
        other = EmbeddingMatrix(
            tokens=tuple(f"tok{i}" for i in range(len(planted.rho))),
            vectors=planted.rho.vectors.copy(),
        )
        with pytest.raises(ArtifactMismatch):
            load_topic_model(path, other)
