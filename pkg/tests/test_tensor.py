"""Autodiff core: forward oracles, backward checks, persistence."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cisea_mrfe.tensor import (
    ConfigurationError,
    DimensionError,
    ParameterStore,
    Tensor,
    add,
    constant,
    conv1d_depthwise,
    conv1d_pointwise,
    cross_entropy,
    finite_difference_check,
    matmul,
    max_over_time,
    mul,
    relu,
    scale,
    sigmoid,
    softmax_rows,
    sub,
    tanh,
    tsum,
)
from conftest import store_with


def naive_matmul(a, b):
    m, k = a.shape
    k2, p = b.shape
    out = np.zeros((m, p), dtype=np.float64)
    for i in range(m):
        for j in range(p):
            for t in range(k):
                out[i, j] += float(a[i, t]) * float(b[t, j])
    return out


def naive_depthwise(e, w, b, k):
    n, d = e.shape
    pad = (k - 1) // 2
    out = np.zeros((n, d), dtype=np.float64)
    for t in range(n):
        for j in range(d):
            acc = 0.0
            for i in range(k):
                src = t + i - pad
                if 0 <= src < n:
                    acc += float(e[src, j]) * float(w[j, i])
            out[t, j] = acc + float(b[j])
    return out


class TestMatmul:
    def test_identity(self):
        a = constant(np.eye(2))
        b = constant([[1, 2], [3, 4]])
        assert np.array_equal(matmul(a, b).data, [[1, 2], [3, 4]])

    def test_orthogonal_rows(self):
        out = matmul(constant([[1, 0]]), constant([[0], [1]]))
        assert np.array_equal(out.data, [[0.0]])

    def test_matches_triple_loop_oracle(self, rng):
        a = rng.standard_normal((3, 4)).astype(np.float32)
        b = rng.standard_normal((4, 2)).astype(np.float32)
        got = matmul(constant(a), constant(b)).data
        assert np.allclose(got, naive_matmul(a, b), atol=1e-6)

    def test_shape_mismatch_names_both_shapes(self):
        with pytest.raises(DimensionError, match=r"\(2, 3\).*\(2, 3\)"):
            matmul(constant(np.ones((2, 3))), constant(np.ones((2, 3))))

    def test_backward_formulas(self, rng):
        a = Tensor(rng.standard_normal((2, 3)), requires_grad=True)
        b = Tensor(rng.standard_normal((3, 2)), requires_grad=True)
        tsum(matmul(a, b)).backward()
        g = np.ones((2, 2), dtype=np.float32)
        assert np.allclose(a.grad, g @ b.data.T, atol=1e-6)
        assert np.allclose(b.grad, a.data.T @ g, atol=1e-6)


class TestActivations:
    def test_relu(self):
        assert np.array_equal(relu(constant([-1.0, 0.0, 2.0])).data, [0, 0, 2])

    def test_tanh_odd(self):
        assert tanh(constant([0.0])).data[0] == 0.0

    def test_sigmoid_gradient_at_zero(self):
        # analytic derivative 0.25, checked against central differences
        store = store_with(x=[0.0])
        err = finite_difference_check(lambda: tsum(sigmoid(store["x"])), store)
        assert err < 1e-5
        store.zero_grad()
        tsum(sigmoid(store["x"])).backward()
        assert abs(store["x"].grad[0] - 0.25) < 1e-7


class TestSoftmax:
    def test_symmetry(self):
        assert np.allclose(softmax_rows(constant([0.0, 0.0])).data, [0.5, 0.5])

    def test_shift_invariance_no_overflow(self):
        out = softmax_rows(constant([1000.0, 1000.0])).data
        assert np.all(np.isfinite(out))
        assert np.allclose(out, [0.5, 0.5])

    def test_matches_float64_oracle(self):
        x = np.array([1.0, 2.0, 3.0])
        expect = np.exp(x) / np.exp(x).sum()
        got = softmax_rows(constant(x.astype(np.float32))).data
        assert np.allclose(got, expect, atol=1e-7)

    @settings(deadline=None, max_examples=100)
    @given(arrays(np.float32, (3, 4), elements=st.floats(-50, 50, width=32)))
    def test_rows_sum_to_one(self, x):
        out = softmax_rows(constant(x)).data
        assert np.allclose(out.sum(axis=1), 1.0, atol=1e-5)


class TestDepthwiseConv:
    def test_k1_identity(self):
        e = constant([[1.0, -2.0], [3.0, 4.0]])
        out = conv1d_depthwise(e, constant(np.ones((2, 1))), constant(np.zeros(2)), 1)
        assert np.array_equal(out.data, e.data)

    def test_hand_sliding_window(self):
        e = constant(np.array([[1.0], [2.0], [3.0], [4.0]]))
        w = constant(np.ones((1, 3)))
        out = conv1d_depthwise(e, w, constant(np.zeros(1)), 3)
        assert np.array_equal(out.data.reshape(-1), [3, 6, 9, 7])

    def test_even_kernel_rejected(self):
        with pytest.raises(ConfigurationError):
            conv1d_depthwise(constant(np.ones((4, 2))),
                             constant(np.ones((2, 2))), constant(np.zeros(2)), 2)

    def test_random_case_matches_naive_loop(self, rng):
        e = rng.standard_normal((16, 8)).astype(np.float32)
        w = rng.standard_normal((8, 5)).astype(np.float32)
        b = rng.standard_normal(8).astype(np.float32)
        got = conv1d_depthwise(constant(e), constant(w), constant(b), 5).data
        assert np.allclose(got, naive_depthwise(e, w, b, 5), atol=1e-5)

    def test_oracle_over_seeds(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(1, 17))
            d = int(rng.integers(1, 9))
            k = int(rng.choice([1, 3, 5, 7]))
            e = rng.standard_normal((n, d)).astype(np.float32)
            w = rng.standard_normal((d, k)).astype(np.float32)
            b = rng.standard_normal(d).astype(np.float32)
            got = conv1d_depthwise(constant(e), constant(w), constant(b), k).data
            assert np.allclose(got, naive_depthwise(e, w, b, k), atol=1e-5)


class TestPointwiseConv:
    def test_identity_weights(self):
        v = constant([[1.0, 2.0], [3.0, 4.0]])
        out = conv1d_pointwise(v, constant(np.eye(2)), constant(np.zeros(2)))
        assert np.array_equal(out.data, v.data)

    def test_channel_sum(self):
        v = constant([[1.0, 2.0], [3.0, 4.0]])
        out = conv1d_pointwise(v, constant([[1.0], [1.0]]), constant(np.zeros(1)))
        assert np.array_equal(out.data.reshape(-1), [3, 7])

    def test_matches_matmul_oracle(self, rng):
        v = rng.standard_normal((5, 3)).astype(np.float32)
        w = rng.standard_normal((3, 4)).astype(np.float32)
        b = rng.standard_normal(4).astype(np.float32)
        got = conv1d_pointwise(constant(v), constant(w), constant(b)).data
        assert np.allclose(got, v @ w + b, atol=1e-6)


class TestMaxOverTime:
    def test_basic(self):
        assert np.array_equal(max_over_time(constant([[1.0, 4.0], [3.0, 2.0]])).data,
                              [3, 4])

    def test_single_row_identity(self):
        row = [[7.0, -2.0, 0.5]]
        assert np.array_equal(max_over_time(constant(row)).data, row[0])

    def test_tie_routes_gradient_to_first_index(self):
        h = Tensor([[2.0], [2.0]], requires_grad=True)
        tsum(max_over_time(h)).backward()
        assert np.array_equal(h.grad, [[1.0], [0.0]])

    def test_empty_rejected(self):
        with pytest.raises(DimensionError):
            max_over_time(constant(np.zeros((0, 2))))

    @settings(deadline=None, max_examples=50)
    @given(arrays(np.float32, (4, 3), elements=st.floats(-100, 100, width=32)))
    def test_dominates_every_row(self, h):
        out = max_over_time(constant(h)).data
        assert np.all(out[None, :] >= h)


class TestCrossEntropy:
    def test_symmetric_half(self):
        out = cross_entropy(constant([0.5, 0.5]), constant([1.0, 0.0]))
        assert abs(out.item() - np.log(2)) < 1e-6

    def test_confident_correct_is_zero(self):
        out = cross_entropy(constant([1.0, 0.0]), constant([1.0, 0.0]))
        assert abs(out.item()) < 1e-9

    def test_softmax_ce_gradient_is_probs_minus_onehot(self):
        logits = Tensor([0.0, 0.0], requires_grad=True)
        cross_entropy(softmax_rows(logits), constant([1.0, 0.0])).backward()
        assert np.allclose(logits.grad, [-0.5, 0.5], atol=1e-6)

    def test_not_one_hot_rejected(self):
        with pytest.raises(ValueError, match="one-hot"):
            cross_entropy(constant([0.5, 0.5]), constant([0.5, 0.5]))


class TestBackward:
    def test_sum_gives_ones(self):
        x = Tensor([1.0, 2.0, 3.0], requires_grad=True)
        tsum(x).backward()
        assert np.array_equal(x.grad, [1, 1, 1])

    def test_square_at_three(self):
        x = Tensor([3.0], requires_grad=True)
        tsum(mul(x, x)).backward()
        assert np.allclose(x.grad, [6.0])

    def test_repeated_calls_accumulate(self):
        x = Tensor([1.0], requires_grad=True)
        tsum(scale(x, 2.0)).backward()
        tsum(scale(x, 2.0)).backward()
        assert np.allclose(x.grad, [4.0])

    def test_non_scalar_rejected(self):
        x = Tensor([1.0, 2.0], requires_grad=True)
        with pytest.raises(DimensionError):
            add(x, x).backward()

    def test_diamond_graph(self):
        # y = x*x + x: both paths must contribute
        x = Tensor([2.0], requires_grad=True)
        tsum(add(mul(x, x), x)).backward()
        assert np.allclose(x.grad, [5.0])


class TestFiniteDifferenceCheck:
    def test_quadratic(self, rng):
        store = store_with(w=rng.standard_normal(5).astype(np.float32))
        err = finite_difference_check(
            lambda: scale(tsum(mul(store["w"], store["w"])), 0.5), store)
        assert err < 1e-6

    def test_softmax_ce_head(self, rng):
        store = store_with(w=rng.standard_normal((3, 2)).astype(np.float32) * 0.5,
                           b=rng.standard_normal(2).astype(np.float32) * 0.1)
        x = constant(rng.standard_normal((1, 3)).astype(np.float32))
        y = constant([[1.0, 0.0]])

        def f():
            return cross_entropy(softmax_rows(add(matmul(x, store["w"]), store["b"])), y)

        assert finite_difference_check(f, store) < 1e-4

    def test_each_op_over_seeds(self):
        # differentiable ops on randomized micro-shapes, 20 seeds each
        for seed in range(20):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(2, 6))
            d = int(rng.integers(1, 5))
            x = rng.standard_normal((n, d)).astype(np.float32)
            c1 = rng.standard_normal((n, d)).astype(np.float32)
            c2 = rng.standard_normal((n, d)).astype(np.float32)
            c3 = rng.standard_normal((d, 3)).astype(np.float32)
            store = store_with(x=x)
            sx = store["x"]
            cases = [
                lambda: tsum(relu(sx)),
                lambda: tsum(tanh(sx)),
                lambda: tsum(sigmoid(sx)),
                lambda: tsum(mul(softmax_rows(sx), constant(c1))),
                lambda: tsum(max_over_time(add(sx, constant(c2)))),
                lambda: tsum(matmul(sx, constant(c3))),
                lambda: tsum(sub(sx, scale(sx, 0.5))),
            ]
            for f in cases:
                store.zero_grad()
                assert finite_difference_check(f, store) < 1e-3

    def test_conv_gradients_over_seeds(self):
        for seed in range(20):
            rng = np.random.default_rng(seed + 100)
            n = int(rng.integers(2, 8))
            d = int(rng.integers(1, 4))
            k = int(rng.choice([1, 3, 5]))
            store = store_with(
                e=rng.standard_normal((n, d)).astype(np.float32),
                w=rng.standard_normal((d, k)).astype(np.float32),
                b=rng.standard_normal(d).astype(np.float32),
            )

            def f():
                return tsum(relu(conv1d_depthwise(store["e"], store["w"], store["b"], k)))

            assert finite_difference_check(f, store) < 1e-3


class TestDeterminism:
    def test_forward_bit_identical(self, rng):
        a = rng.standard_normal((4, 4)).astype(np.float32)
        one = softmax_rows(matmul(constant(a), constant(a))).data
        two = softmax_rows(matmul(constant(a), constant(a))).data
        assert one.tobytes() == two.tobytes()


class TestParameterStore:
    def test_duplicate_name_rejected(self):
        store = ParameterStore()
        store.add("w", (2,))
        with pytest.raises(KeyError):
            store.add("w", (2,))

    def test_total_params(self):
        store = ParameterStore()
        store.add("a", (2, 3), fan_in=3)
        store.add("b", (4,))
        assert store.total_params() == 10

    def test_seeded_init_reproducible(self):
        a = ParameterStore(rng_seed=7)
        b = ParameterStore(rng_seed=7)
        ta = a.add("w", (3, 3), fan_in=3)
        tb = b.add("w", (3, 3), fan_in=3)
        assert ta.data.tobytes() == tb.data.tobytes()

    def test_checkpoint_round_trip_bit_exact(self, tmp_path, rng):
        store = ParameterStore(rng_seed=1)
        store.add("layer.w", (3, 4), fan_in=4)
        store.add("layer.b", (4,))
        store.add("deep.t", (2, 2, 2), init=rng.standard_normal((2, 2, 2)))
        path = tmp_path / "params.ckpt"
        store.save(path)
        loaded = ParameterStore.load(path)
        assert loaded.names() == store.names()
        for name, t in store:
            assert loaded[name].data.tobytes() == t.data.tobytes()
            assert loaded[name].shape == t.shape

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.ckpt"
        path.write_bytes(b"NOPE" + b"\x00" * 16)
        with pytest.raises(ValueError, match="magic"):
            ParameterStore.load(path)

    def test_iteration_order_is_insertion_order(self):
        store = ParameterStore()
        for name in ("z", "a", "m"):
            store.add(name, (1,))
        assert store.names() == ["z", "a", "m"]
