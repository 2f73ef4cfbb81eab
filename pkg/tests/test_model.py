"""Variant assembly, stream fusion, and the prediction head."""

import numpy as np
import pytest

from cisea_mrfe import eece as eece_mod
from cisea_mrfe import sade as sade_mod
from cisea_mrfe.embedding import embed
from cisea_mrfe.model import (
    EncodedSample,
    ModelConfig,
    VARIANTS,
    build_params,
    forward,
    fuse_streams,
    head_width,
    loss,
    make_variant,
    predict_head,
    sample_loss,
)
from cisea_mrfe.sade import SadeConfig
from cisea_mrfe.tensor import (
    ConfigurationError,
    add,
    constant,
    matmul,
    max_over_time,
    softmax_rows,
)
from conftest import store_with


def micro_cfg(**overrides):
    base = dict(variant="cisea_mrfe", embed_dim=6, conv_channels=5, hidden=3,
                attn_dim=2, n_emotions=2, classes=2, max_len=16, dropout=0.0)
    base.update(overrides)
    return ModelConfig(**base)


def micro_sample(n=4, label=0, vocab_size=10, seed=0):
    rng = np.random.default_rng(seed)
    ids = [int(i) for i in rng.integers(5, vocab_size, size=n)]
    return EncodedSample(ids=ids, tokens=["tok"] * n, label=label)


class TestModelConfig:
    def test_unknown_variant_rejected(self):
        with pytest.raises(ConfigurationError):
            ModelConfig(variant="bogus")

    def test_unknown_fusion_rejected(self):
        with pytest.raises(ConfigurationError):
            ModelConfig(fusion="bogus")

    def test_too_few_classes_rejected(self):
        with pytest.raises(ConfigurationError):
            ModelConfig(classes=1)

    def test_inconsistent_flags_rejected(self):
        with pytest.raises(ConfigurationError):
            ModelConfig(variant="cisea_sade", use_eece=True)
        with pytest.raises(ConfigurationError):
            ModelConfig(variant="cisea_eece", use_sade=True)
        with pytest.raises(ConfigurationError):
            ModelConfig(variant="ci_mrfe", use_sea=True)

    def test_make_variant_flags(self):
        assert make_variant("cisea_sade").use_eece is False
        assert make_variant("cisea_eece").use_sade is False
        assert make_variant("ci_mrfe").use_sea is False
        full = make_variant("cisea_mrfe")
        assert full.use_sade and full.use_eece and full.use_sea

    def test_head_width(self):
        assert head_width(make_variant("cisea_sade", conv_channels=7)) == 7
        assert head_width(micro_cfg()) == 6  # 2h
        assert head_width(micro_cfg(fusion="summation")) == 6


class TestFuseStreams:
    def _fusion_store(self, rng, c, f):
        return store_with(**{
            "fuse.pv": rng.standard_normal((c, f)),
            "fuse.ph": rng.standard_normal((f, f)),
            "fuse.sv": rng.standard_normal((f, 1)),
            "fuse.sh": rng.standard_normal((f, 1)),
        })

    def test_sequential_mode_rejected(self, rng):
        store = self._fusion_store(rng, 3, 4)
        v = constant(rng.standard_normal((1, 3)).astype(np.float32))
        h = constant(rng.standard_normal((1, 4)).astype(np.float32))
        with pytest.raises(ConfigurationError):
            fuse_streams(v, h, "sequential", store)

    def test_summation_is_projected_sum(self, rng):
        store = self._fusion_store(rng, 3, 4)
        v = constant(rng.standard_normal((1, 3)).astype(np.float32))
        h = constant(rng.standard_normal((1, 4)).astype(np.float32))
        out = fuse_streams(v, h, "summation", store).data
        expect = v.data @ store["fuse.pv"].data + h.data @ store["fuse.ph"].data
        assert np.allclose(out, expect, atol=1e-6)

    def test_attention_stack_is_convex_combination(self, rng):
        store = self._fusion_store(rng, 3, 4)
        v = constant(rng.standard_normal((1, 3)).astype(np.float32))
        h = constant(rng.standard_normal((1, 4)).astype(np.float32))
        pv = v.data @ store["fuse.pv"].data
        ph = h.data @ store["fuse.ph"].data
        out = fuse_streams(v, h, "attention_stack", store).data
        lo = np.minimum(pv, ph) - 1e-5
        hi = np.maximum(pv, ph) + 1e-5
        assert np.all(out >= lo) and np.all(out <= hi)

    def test_identical_projections(self, rng):
        # equal projection weights and equal inputs make both streams
        # project to the same vector p: attention returns p, summation 2p
        f = 4
        w = rng.standard_normal((f, f)).astype(np.float32)
        s = rng.standard_normal((f, 1)).astype(np.float32)
        store = store_with(**{"fuse.pv": w, "fuse.ph": w,
                              "fuse.sv": s, "fuse.sh": s})
        x = constant(rng.standard_normal((1, f)).astype(np.float32))
        p = x.data @ w
        att = fuse_streams(x, x, "attention_stack", store).data
        summ = fuse_streams(x, x, "summation", store).data
        assert np.allclose(att, p, atol=1e-5)
        assert np.allclose(summ, 2.0 * p, atol=1e-5)


class TestPredictHead:
    def test_zero_params_uniform(self):
        store = store_with(**{"head.w": np.zeros((4, 3)), "head.b": np.zeros(3)})
        pred = predict_head(constant(np.ones((1, 4), dtype=np.float32)), store)
        assert np.allclose(pred.probabilities.data, 1 / 3)
        assert pred.predicted == 0

    def test_bias_shift_invariance(self, rng):
        w = rng.standard_normal((4, 3)).astype(np.float32)
        x = constant(rng.standard_normal((1, 4)).astype(np.float32))
        base = predict_head(x, store_with(**{"head.w": w, "head.b": np.zeros(3)}))
        shifted = predict_head(
            x, store_with(**{"head.w": w, "head.b": np.full(3, 5.0)}))
        assert np.allclose(base.probabilities.data,
                           shifted.probabilities.data, atol=1e-5)
        assert base.predicted == shifted.predicted

    def test_loss_label_out_of_range(self):
        store = store_with(**{"head.w": np.zeros((2, 2)), "head.b": np.zeros(2)})
        pred = predict_head(constant(np.ones((1, 2), dtype=np.float32)), store)
        with pytest.raises(ValueError):
            loss(pred, 2)
        with pytest.raises(ValueError):
            loss(pred, -1)

    def test_uniform_binary_loss_is_ln2(self):
        store = store_with(**{"head.w": np.zeros((2, 2)), "head.b": np.zeros(2)})
        pred = predict_head(constant(np.ones((1, 2), dtype=np.float32)), store)
        assert abs(loss(pred, 1).data.item() - np.log(2.0)) < 1e-6


class TestForward:
    def test_all_variants_produce_simplex_rows(self, rng):
        sample = micro_sample()
        for variant in VARIANTS:
            cfg = make_variant(variant, embed_dim=6, conv_channels=5, hidden=3,
                               attn_dim=2, n_emotions=2, classes=3, max_len=16,
                               dropout=0.0)
            store = build_params(cfg, vocab_size=10, seed=1)
            pred, _ = forward(sample, cfg, store)
            probs = pred.probabilities.data
            assert probs.shape == (1, 3)
            assert abs(probs.sum() - 1.0) < 1e-5
            assert pred.predicted == int(probs.argmax())

    def test_parallel_fusion_modes_run(self, rng):
        sample = micro_sample()
        for fusion in ("summation", "attention_stack"):
            cfg = micro_cfg(fusion=fusion)
            store = build_params(cfg, vocab_size=10, seed=2)
            pred, inter = forward(sample, cfg, store)
            assert inter["features"].shape == (1, head_width(cfg))
            assert abs(pred.probabilities.data.sum() - 1.0) < 1e-5

    def test_zero_dropout_train_equals_eval(self):
        cfg = micro_cfg(dropout=0.0)
        store = build_params(cfg, vocab_size=10, seed=3)
        sample = micro_sample()
        train, _ = forward(sample, cfg, store, train_mode=True,
                           rng=np.random.default_rng(0))
        evald, _ = forward(sample, cfg, store, train_mode=False)
        assert train.probabilities.data.tobytes() == evald.probabilities.data.tobytes()

    def test_dropout_changes_train_output(self):
        cfg = micro_cfg(dropout=0.5)
        store = build_params(cfg, vocab_size=10, seed=3)
        sample = micro_sample()
        train, _ = forward(sample, cfg, store, train_mode=True,
                           rng=np.random.default_rng(0))
        evald, _ = forward(sample, cfg, store, train_mode=False)
        assert not np.array_equal(train.probabilities.data,
                                  evald.probabilities.data)

    def test_sequential_forward_matches_manual_composition(self):
        cfg = micro_cfg()
        store = build_params(cfg, vocab_size=10, seed=4)
        sample = micro_sample(n=4)
        pred, _ = forward(sample, cfg, store)

        e = embed(sample.ids, store["embed.table"]).values
        sade_cfg = SadeConfig(kernels=cfg.kernels, input_width=cfg.embed_dim,
                              out_channels=cfg.conv_channels)
        v = sade_mod.sade_forward(e, sade_cfg, store)
        h_tilde, _, _ = eece_mod.eece_forward(v, e, sample.tokens, store,
                                              cfg.hidden, cfg.negation,
                                              cfg.gate_on)
        pooled = constant(max_over_time(h_tilde).data.reshape(1, -1))
        probs = softmax_rows(add(matmul(pooled, store["head.w"]),
                                 store["head.b"]))
        assert pred.probabilities.data.tobytes() == probs.data.tobytes()

    def test_max_len_enforced(self):
        cfg = micro_cfg(max_len=3)
        store = build_params(cfg, vocab_size=10, seed=5)
        with pytest.raises(ConfigurationError):
            forward(micro_sample(n=4), cfg, store)

    def test_contextual_embeddings_skip_lookup_table(self, rng):
        cfg = micro_cfg()
        store = build_params(cfg, vocab_size=10, seed=6, embed_table=False)
        assert "embed.table" not in store
        mats = rng.standard_normal((4, cfg.embed_dim)).astype(np.float32)
        sample = EncodedSample(ids=[0] * 4, tokens=["tok"] * 4, label=1,
                               embeddings=constant(mats))
        pred, _ = forward(sample, cfg, store)
        assert abs(pred.probabilities.data.sum() - 1.0) < 1e-5

    def test_sample_loss_positive(self):
        cfg = micro_cfg()
        store = build_params(cfg, vocab_size=10, seed=7)
        value = sample_loss(micro_sample(label=1), cfg, store).data.item()
        assert value > 0.0

    def test_without_sade_uses_standard_conv(self):
        cfg = make_variant("cisea_mrfe", use_sade=False, embed_dim=6,
                           conv_channels=5, hidden=3, attn_dim=2, n_emotions=2,
                           classes=2, max_len=16, dropout=0.0)
        store = build_params(cfg, vocab_size=10, seed=8)
        assert "conv.w" in store and "sade.pw.w" not in store
        pred, inter = forward(micro_sample(), cfg, store)
        assert "conv_out" in inter
        assert abs(pred.probabilities.data.sum() - 1.0) < 1e-5
