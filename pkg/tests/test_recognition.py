"""Classifier numerics: glyph normalization, PCA vs a full-batch oracle,
finite-difference gradient checks, training determinism."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aocr.errors import DegenerateTrainingError, InvalidInputError
from aocr.recognition import (GlyphSample, IncrementalPca, Mlp, TrainConfig,
                              he_init, mlp_forward, mlp_loss_and_grads,
                              normalize_glyph, pca_fit, pca_project,
                              pca_reconstruct, predict, train)


def full_batch_pca_oracle(X, k):
    """Eigendecomposition of the covariance matrix: the reference route."""
    X = np.asarray(X, dtype=np.float64)
    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / (len(X) - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1][:k]
    return mean, evecs[:, order].T  # (k, d) rows


def reconstruction_errors(X, mean, components):
    centered = np.asarray(X, dtype=np.float64) - mean
    recon = centered @ components.T @ components
    return ((centered - recon) ** 2).sum(axis=1)


class TestNormalizeGlyph:
    def test_full_bleed_24_is_identity(self):
        rng = np.random.default_rng(0)
        glyph = (rng.random((24, 24)) < 0.5).astype(np.uint8)
        glyph[0, 0] = glyph[-1, -1] = glyph[0, -1] = glyph[-1, 0] = 1
        assert np.array_equal(normalize_glyph(glyph), glyph.reshape(576))

    def test_2x_replication_matches_original(self):
        rng = np.random.default_rng(1)
        glyph = (rng.random((24, 24)) < 0.4).astype(np.uint8)
        glyph[0, 0] = glyph[-1, -1] = glyph[0, -1] = glyph[-1, 0] = 1
        doubled = np.kron(glyph, np.ones((2, 2), dtype=np.uint8))
        assert np.array_equal(normalize_glyph(doubled), normalize_glyph(glyph))

    def test_single_pixel_centered(self):
        crop = np.zeros((9, 9), dtype=np.uint8)
        crop[3, 7] = 1
        vec = normalize_glyph(crop).reshape(24, 24)
        assert vec.sum() == 1
        assert vec[11, 11] == 1

    def test_large_glyph_shrinks_keeping_aspect(self):
        crop = np.ones((48, 12), dtype=np.uint8)
        vec = normalize_glyph(crop).reshape(24, 24)
        rows, cols = np.nonzero(vec)
        assert rows.max() - rows.min() + 1 == 24
        assert cols.max() - cols.min() + 1 == 6

    def test_empty_crop_rejected(self):
        with pytest.raises(InvalidInputError):
            normalize_glyph(np.zeros((5, 5), dtype=np.uint8))


class TestPca:
    def test_planar_data_explains_everything_with_two_components(self):
        rng = np.random.default_rng(2)
        basis = rng.normal(size=(2, 576))
        coeffs = rng.normal(size=(300, 2))
        X = coeffs @ basis + rng.normal(size=576)
        model = pca_fit(X, k=2)
        assert model.explained_variance_ratio.sum() == pytest.approx(1.0, abs=1e-6)

    def test_matches_full_batch_oracle_on_random_binary(self):
        rng = np.random.default_rng(3)
        X = (rng.random((1000, 576)) < 0.3).astype(np.float64)
        model = pca_fit(X, k=200)
        mean_o, comps_o = full_batch_pca_oracle(X, 200)
        ours = reconstruction_errors(X, model.mean, model.components)
        oracle = reconstruction_errors(X, mean_o, comps_o)
        assert np.abs(ours - oracle).max() < 1e-4

    def test_identical_samples_collapse_to_zero(self):
        X = np.tile(np.ones(576) * 0.5, (50, 1))
        model = pca_fit(X, k=3)
        assert np.allclose(model.explained_variance_ratio, 0.0)
        assert np.allclose(pca_project(model, X[0]), 0.0)
        assert model.rank_deficient

    def test_components_orthonormal(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(400, 64))
        model = pca_fit(X, k=16)
        gram = model.components @ model.components.T
        assert np.abs(gram - np.eye(16)).max() < 1e-6

    def test_projection_examples(self):
        rng = np.random.default_rng(6)
        X = rng.normal(size=(300, 64))
        model = pca_fit(X, k=8)
        assert np.allclose(pca_project(model, model.mean), 0.0, atol=1e-9)
        e0 = pca_project(model, model.mean + model.components[0])
        expected = np.zeros(8)
        expected[0] = 1.0
        assert np.allclose(e0, expected, atol=1e-9)

    def test_reconstruct_project_idempotent(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(200, 32))
        model = pca_fit(X, k=5)
        z = pca_project(model, X[:20])
        z2 = pca_project(model, pca_reconstruct(model, z))
        assert np.allclose(z, z2, atol=1e-9)

    def test_multibatch_close_to_oracle_on_low_rank_data(self):
        rng = np.random.default_rng(8)
        basis = rng.normal(size=(6, 80))
        X = rng.normal(size=(600, 6)) @ basis + 0.01 * rng.normal(size=(600, 80))
        model = pca_fit(X, k=10, batch_size=150)  # four incremental updates
        mean_o, comps_o = full_batch_pca_oracle(X, 10)
        ours = reconstruction_errors(X, model.mean, model.components)
        oracle = reconstruction_errors(X, mean_o, comps_o)
        assert np.abs(ours - oracle).mean() < 1e-3

    def test_variance_ratios_non_increasing(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(500, 48)) * np.linspace(3, 0.1, 48)
        model = pca_fit(X, k=20)
        assert (np.diff(model.explained_variance_ratio) <= 1e-12).all()

    def test_too_few_samples_rejected(self):
        with pytest.raises(InvalidInputError):
            pca_fit(np.zeros((5, 20)), k=10)

    def test_streaming_mean_is_exact(self):
        rng = np.random.default_rng(10)
        X = rng.normal(size=(500, 30))
        ipca = IncrementalPca(k=5)
        for i in range(0, 500, 100):
            ipca.partial_fit(X[i:i + 100])
        assert np.allclose(ipca.mean, X.mean(axis=0), atol=1e-12)


class TestMlpForward:
    def test_zero_model_is_uniform(self):
        m = Mlp(weights=[np.zeros((10, 20)), np.zeros((5, 10)), np.zeros((29, 5))],
                biases=[np.zeros(10), np.zeros(5), np.zeros(29)])
        probs = mlp_forward(m, np.ones(20))
        assert np.allclose(probs, 1 / 29)

    def test_inference_deterministic(self):
        rng = np.random.default_rng(11)
        m = he_init((20, 10, 5, 3), rng)
        x = rng.normal(size=20)
        assert np.array_equal(mlp_forward(m, x), mlp_forward(m, x))

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_softmax_simplex(self, seed):
        rng = np.random.default_rng(seed)
        m = he_init((8, 6, 5, 4), rng)
        probs = mlp_forward(m, rng.normal(size=8) * 10)
        assert (probs >= 0).all()
        assert probs.sum() == pytest.approx(1.0, abs=1e-6)

    def test_shift_invariance_of_argmax(self):
        rng = np.random.default_rng(12)
        m = he_init((8, 6, 5, 4), rng)
        x = rng.normal(size=8)
        base = mlp_forward(m, x).argmax()
        shifted = Mlp([w.copy() for w in m.weights], [b.copy() for b in m.biases])
        shifted.biases[-1] = shifted.biases[-1] + 3.7  # constant on all logits
        assert mlp_forward(shifted, x).argmax() == base

    def test_nonfinite_rejected(self):
        rng = np.random.default_rng(13)
        m = he_init((4, 3, 3, 2), rng)
        with pytest.raises(InvalidInputError):
            mlp_forward(m, np.array([1.0, np.nan, 0.0, 0.0]))


def finite_difference_grads(m: Mlp, X, y, eps=1e-4):
    """Central differences on every parameter; dropout off."""
    grads_w, grads_b = [], []
    for layer in range(len(m.weights)):
        gw = np.zeros_like(m.weights[layer])
        for idx in np.ndindex(m.weights[layer].shape):
            orig = m.weights[layer][idx]
            m.weights[layer][idx] = orig + eps
            up, _, _ = mlp_loss_and_grads(m, X, y)
            m.weights[layer][idx] = orig - eps
            down, _, _ = mlp_loss_and_grads(m, X, y)
            m.weights[layer][idx] = orig
            gw[idx] = (up - down) / (2 * eps)
        grads_w.append(gw)
        gb = np.zeros_like(m.biases[layer])
        for idx in np.ndindex(m.biases[layer].shape):
            orig = m.biases[layer][idx]
            m.biases[layer][idx] = orig + eps
            up, _, _ = mlp_loss_and_grads(m, X, y)
            m.biases[layer][idx] = orig - eps
            down, _, _ = mlp_loss_and_grads(m, X, y)
            m.biases[layer][idx] = orig
            gb[idx] = (up - down) / (2 * eps)
        grads_b.append(gb)
    return grads_w, grads_b


def max_relative_error(analytic, numeric):
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(np.abs(a) + np.abs(n), 1e-8)
        worst = max(worst, float((np.abs(a - n) / denom).max()))
    return worst


class TestGradients:
    def test_backprop_matches_finite_differences(self):
        rng = np.random.default_rng(14)
        m = he_init((12, 8, 6, 4), rng)
        X = rng.normal(size=(5, 12))
        y = rng.integers(0, 4, size=5)
        _, gw, gb = mlp_loss_and_grads(m, X, y)
        nw, nb = finite_difference_grads(m, X, y)
        assert max_relative_error(gw, nw) <= 1e-3
        assert max_relative_error(gb, nb) <= 1e-3

    def test_gradient_with_dropout_masks_fixed(self):
        rng = np.random.default_rng(15)
        m = he_init((10, 7, 5, 3), rng, dropout=0.1)
        X = rng.normal(size=(4, 10))
        y = rng.integers(0, 3, size=4)
        masks = [(rng.random((4, 7)) >= 0.1) / 0.9, (rng.random((4, 5)) >= 0.1) / 0.9]
        loss1, gw, gb = mlp_loss_and_grads(m, X, y, masks)

        eps = 1e-5
        layer, idx = 0, (2, 3)
        m.weights[layer][idx] += eps
        up, _, _ = mlp_loss_and_grads(m, X, y, masks)
        m.weights[layer][idx] -= 2 * eps
        down, _, _ = mlp_loss_and_grads(m, X, y, masks)
        m.weights[layer][idx] += eps
        numeric = (up - down) / (2 * eps)
        assert gw[layer][idx] == pytest.approx(numeric, rel=1e-4, abs=1e-8)


class TestTrain:
    def _toy_samples(self, n=200, seed=0):
        rng = np.random.default_rng(seed)
        samples = []
        for i in range(n):
            vec = np.zeros(576, dtype=np.uint8)
            if i % 2 == 0:
                vec[: 200] = (rng.random(200) < 0.8).astype(np.uint8)
                label = 0
            else:
                vec[376:] = (rng.random(200) < 0.8).astype(np.uint8)
                label = 1
            samples.append(GlyphSample(pixels=vec, label=label, eow=False))
        return samples

    def test_separable_toy_reaches_perfect_validation(self):
        samples = self._toy_samples()
        X = np.stack([s.pixels for s in samples]).astype(np.float64)
        pca = pca_fit(X, k=20)
        cfg = TrainConfig(batch_size=32, epochs=20, seed=1, val_fraction=0.1)
        model, history = train(samples, cfg, pca)
        assert max(h.val_accuracy for h in history) == 1.0

    def test_loss_decreases_over_training(self):
        samples = self._toy_samples(300, seed=2)
        X = np.stack([s.pixels for s in samples]).astype(np.float64)
        pca = pca_fit(X, k=20)
        cfg = TrainConfig(batch_size=64, epochs=15, seed=3)
        _, history = train(samples, cfg, pca)
        assert history[-1].train_loss < history[0].train_loss

    def test_fixed_seed_bit_identical(self):
        samples = self._toy_samples(120, seed=4)
        X = np.stack([s.pixels for s in samples]).astype(np.float64)
        pca = pca_fit(X, k=10)
        cfg = TrainConfig(batch_size=32, epochs=5, seed=42)
        m1, h1 = train(samples, cfg, pca)
        m2, h2 = train(samples, cfg, pca)
        for w1, w2 in zip(m1.weights, m2.weights):
            assert np.array_equal(w1, w2)
        assert [h.train_loss for h in h1] == [h.train_loss for h in h2]

    def test_single_class_rejected(self):
        samples = [GlyphSample(pixels=np.ones(576, dtype=np.uint8), label=3, eow=False)
                   for _ in range(60)]
        X = np.stack([s.pixels for s in samples]).astype(np.float64)
        pca = pca_fit(X, k=5)
        with pytest.raises(DegenerateTrainingError):
            train(samples, TrainConfig(epochs=1), pca)


class TestPredict:
    def test_uniform_model_ties_break_to_class_zero(self):
        pca_X = np.random.default_rng(16).normal(size=(300, 576))
        pca = pca_fit(pca_X, k=8)
        m = Mlp(weights=[np.zeros((6, 8)), np.zeros((4, 6)), np.zeros((29, 4))],
                biases=[np.zeros(6), np.zeros(4), np.zeros(29)])
        crop = np.zeros((10, 10), dtype=np.uint8)
        crop[3:7, 3:7] = 1
        cls, conf, probs = predict(pca, m, crop)
        assert cls == 0
        assert conf == pytest.approx(1 / 29)
        assert probs.sum() == pytest.approx(1.0, abs=1e-6)

    def test_trained_model_recalls_training_glyph(self):
        rng = np.random.default_rng(17)
        crops = []
        samples = []
        for i in range(100):
            crop = np.zeros((30, 30), dtype=np.uint8)
            if i % 2 == 0:
                crop[2:28, 4:9] = 1
                label = 0
            else:
                crop[20:28, 2:28] = 1
                label = 1
            crops.append(crop)
            samples.append(GlyphSample(pixels=normalize_glyph(crop), label=label,
                                       eow=False))
        X = np.stack([s.pixels for s in samples]).astype(np.float64)
        pca = pca_fit(X, k=10)
        model, _ = train(samples, TrainConfig(batch_size=16, epochs=10, seed=5), pca)
        cls, conf, _ = predict(pca, model, crops[0])
        assert cls == 0
        assert conf > 1 / 29
