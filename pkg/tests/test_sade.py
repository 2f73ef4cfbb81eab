"""Multi-kernel depthwise encoder."""

import numpy as np
import pytest

from cisea_mrfe.sade import (
    SadeConfig,
    register_params,
    sade_forward,
    sade_param_count,
    sade_pre_projection,
)
from cisea_mrfe.tensor import (
    ConfigurationError,
    ParameterStore,
    constant,
    conv1d_depthwise,
    conv1d_pointwise,
    finite_difference_check,
    relu,
    tsum,
)
from conftest import store_with


def identity_store(d, kernels, c):
    """Depthwise w=1 (center tap), b=0; pointwise identity (requires c == d)."""
    store = ParameterStore()
    for k in kernels:
        w = np.zeros((d, k), dtype=np.float32)
        w[:, k // 2] = 1.0
        store.add(f"sade.dw{k}.w", (d, k), init=w)
        store.add(f"sade.dw{k}.b", (d,))
    store.add("sade.pw.w", (d, c), init=np.eye(d, c, dtype=np.float32))
    store.add("sade.pw.b", (c,))
    return store


class TestSadeConfig:
    def test_empty_rejected(self):
        with pytest.raises(ConfigurationError):
            SadeConfig(kernels=(), input_width=4, out_channels=4)

    def test_even_kernel_rejected(self):
        with pytest.raises(ConfigurationError):
            SadeConfig(kernels=(2,), input_width=4, out_channels=4)

    def test_normalized_ascending_unique(self):
        cfg = SadeConfig(kernels=(7, 3, 3, 1), input_width=4, out_channels=4)
        assert cfg.kernels == (1, 3, 7)
        assert cfg.window_size == 7


class TestForward:
    def test_k1_identity_weights_give_relu(self, rng):
        d = 3
        cfg = SadeConfig(kernels=(1,), input_width=d, out_channels=d)
        store = identity_store(d, (1,), d)
        e = constant(rng.standard_normal((5, d)).astype(np.float32))
        out = sade_forward(e, cfg, store)
        assert np.array_equal(out.data, np.maximum(e.data, 0))

    def test_single_kernel_equals_single_branch_bit_exact(self, rng):
        d, c, n = 4, 3, 6
        cfg = SadeConfig(kernels=(3,), input_width=d, out_channels=c)
        store = ParameterStore(rng_seed=2)
        register_params(store, cfg)
        e = constant(rng.standard_normal((n, d)).astype(np.float32))
        got = sade_forward(e, cfg, store).data
        branch = relu(conv1d_depthwise(e, store["sade.dw3.w"], store["sade.dw3.b"], 3))
        expect = conv1d_pointwise(branch, store["sade.pw.w"], store["sade.pw.b"]).data
        assert got.tobytes() == expect.tobytes()

    def test_two_kernel_hand_case(self):
        # d=1: k=1 branch is w1*x, k=3 branch is the sliding window sum
        cfg = SadeConfig(kernels=(1, 3), input_width=1, out_channels=1)
        store = store_with(**{
            "sade.dw1.w": [[2.0]],
            "sade.dw1.b": [0.0],
            "sade.dw3.w": [[1.0, 1.0, 1.0]],
            "sade.dw3.b": [0.0],
            "sade.pw.w": [[1.0]],
            "sade.pw.b": [0.0],
        })
        e = constant([[1.0], [2.0], [3.0], [4.0]])
        # branch k=1: [2,4,6,8]; branch k=3 (zero padded): [3,6,9,7]
        expect = (np.array([2, 4, 6, 8.0]) + np.array([3, 6, 9, 7.0])) / 2.0
        got = sade_forward(e, cfg, store).data.reshape(-1)
        assert np.allclose(got, expect, atol=1e-6)

    def test_kernel_permutation_bit_identical(self, rng):
        d, c, n = 3, 2, 5
        e = rng.standard_normal((n, d)).astype(np.float32)
        outs = []
        for kernels in [(1, 3, 5), (5, 1, 3), (3, 5, 1)]:
            cfg = SadeConfig(kernels=kernels, input_width=d, out_channels=c)
            store = ParameterStore(rng_seed=0)
            register_params(store, cfg)
            outs.append(sade_forward(constant(e), cfg, store).data.tobytes())
        assert outs[0] == outs[1] == outs[2]

    def test_pre_projection_nonnegative(self, rng):
        cfg = SadeConfig(kernels=(1, 3, 5), input_width=4, out_channels=4)
        store = ParameterStore(rng_seed=3)
        register_params(store, cfg)
        e = constant(rng.standard_normal((8, 4)).astype(np.float32))
        v_pre = sade_pre_projection(e, cfg, store)
        assert np.all(v_pre.data >= 0)

    def test_gradients(self):
        cfg = SadeConfig(kernels=(1, 3), input_width=3, out_channels=2)
        store = ParameterStore(rng_seed=4)
        register_params(store, cfg)
        # seed chosen so no ReLU pre-activation sits within eps of zero
        e = constant(np.random.default_rng(2).standard_normal((4, 3)).astype(np.float32))
        err = finite_difference_check(lambda: tsum(sade_forward(e, cfg, store)), store)
        assert err < 1e-3


class TestParamCount:
    def test_hand_count_micro(self):
        cfg = SadeConfig(kernels=(3,), input_width=1, out_channels=1)
        assert sade_param_count(cfg) == 6

    def test_published_scale_arithmetic(self):
        cfg = SadeConfig(kernels=(1, 3, 5, 7), input_width=768, out_channels=128)
        assert sade_param_count(cfg) == 113_792

    def test_count_matches_registered_store(self):
        cfg = SadeConfig(kernels=(1, 3, 5, 7), input_width=6, out_channels=4)
        store = ParameterStore()
        register_params(store, cfg)
        assert store.total_params() == sade_param_count(cfg)
