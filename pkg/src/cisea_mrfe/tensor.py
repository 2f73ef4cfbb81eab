"""Minimal dense-tensor core with reverse-mode automatic differentiation.

Tensors are float32, rank <= 3, numpy-backed. Every operation the model
needs records a backward closure; `backward()` on a scalar loss walks the
graph in reverse topological order and accumulates gradients into the
`.grad` buffers of all requires_grad leaves.
"""

from __future__ import annotations

import struct
from collections import OrderedDict
from typing import Callable, Iterable, Sequence

import numpy as np


class DimensionError(ValueError):
    pass


class ConfigurationError(ValueError):
    pass


_GRAD_ENABLED = True
_DTYPE = np.float32


class precision:
    """Temporarily switch the scalar type of newly built tensors.

    Trainable parameters stay float32; the gradient checker evaluates the
    objective under float64 because central differences at eps = 1e-3
    cannot resolve small gradients through a float32 forward pass.
    """

    def __init__(self, dtype):
        self.dtype = np.dtype(dtype)

    def __enter__(self):
        global _DTYPE
        self._prev = _DTYPE
        _DTYPE = self.dtype
        return self

    def __exit__(self, *exc):
        global _DTYPE
        _DTYPE = self._prev
        return False


class no_grad:
    """Context manager disabling graph recording (used by oracles/profiling)."""

    def __enter__(self):
        global _GRAD_ENABLED
        self._prev = _GRAD_ENABLED
        _GRAD_ENABLED = False
        return self

    def __exit__(self, *exc):
        global _GRAD_ENABLED
        _GRAD_ENABLED = self._prev
        return False


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        arr = np.asarray(data, dtype=dtype or _DTYPE)
        if arr.ndim > 3:
            raise DimensionError(f"rank {arr.ndim} > 3 not supported")
        self.data = arr
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable[[], None] | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def zero_grad(self) -> None:
        self.grad = None

    def _accumulate(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def backward(self) -> None:
        if self.data.size != 1:
            raise DimensionError(f"backward requires a scalar, got shape {self.shape}")
        topo: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in seen:
                    stack.append((p, False))
        self._accumulate(np.ones_like(self.data))
        for node in reversed(topo):
            if node._backward is not None:
                node._backward()
        # intermediate grads are scratch; only leaves keep theirs
        for node in topo:
            if node._parents and node is not self:
                node.grad = None

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"


def _make(data: np.ndarray, parents: Sequence[Tensor], backward: Callable[[], None]) -> Tensor:
    out = Tensor(data)
    if _GRAD_ENABLED and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward
    return out


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum `grad` down to `shape` (inverse of numpy broadcasting)."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for ax, dim in enumerate(shape):
        if dim == 1 and grad.shape[ax] != 1:
            grad = grad.sum(axis=ax, keepdims=True)
    return grad.reshape(shape)


def constant(data) -> Tensor:
    return Tensor(data, requires_grad=False)


def add(a: Tensor, b: Tensor) -> Tensor:
    out_data = a.data + b.data
    out = _make(out_data, (a, b), lambda: None)

    def back():
        if a.requires_grad:
            a._accumulate(_unbroadcast(out.grad, a.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(out.grad, b.shape))

    out._backward = back if out._parents else None
    return out


def sub(a: Tensor, b: Tensor) -> Tensor:
    return add(a, scale(b, -1.0))


def mul(a: Tensor, b: Tensor) -> Tensor:
    out_data = a.data * b.data
    out = _make(out_data, (a, b), lambda: None)

    def back():
        if a.requires_grad:
            a._accumulate(_unbroadcast(out.grad * b.data, a.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(out.grad * a.data, b.shape))

    out._backward = back if out._parents else None
    return out


def scale(a: Tensor, s: float) -> Tensor:
    factor = a.data.dtype.type(s)
    out = _make(a.data * factor, (a,), lambda: None)

    def back():
        if a.requires_grad:
            a._accumulate(out.grad * factor)

    out._backward = back if out._parents else None
    return out


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul shape mismatch: {a.shape} x {b.shape}")
    out = _make(a.data @ b.data, (a, b), lambda: None)

    def back():
        if a.requires_grad:
            a._accumulate(out.grad @ b.data.T)
        if b.requires_grad:
            b._accumulate(a.data.T @ out.grad)

    out._backward = back if out._parents else None
    return out


def activation(x: Tensor, kind: str) -> Tensor:
    if kind == "relu":
        y = np.maximum(x.data, 0)

        def deriv():
            return (x.data > 0).astype(np.float32)
    elif kind == "tanh":
        y = np.tanh(x.data)

        def deriv():
            return 1.0 - y * y
    elif kind == "sigmoid":
        y = 1.0 / (1.0 + np.exp(-x.data.astype(np.float64)))
        y = y.astype(x.data.dtype)

        def deriv():
            return y * (1.0 - y)
    else:
        raise ConfigurationError(f"unknown activation kind {kind!r}")
    out = _make(y, (x,), lambda: None)

    def back():
        if x.requires_grad:
            x._accumulate(out.grad * deriv())

    out._backward = back if out._parents else None
    return out


def relu(x: Tensor) -> Tensor:
    return activation(x, "relu")


def tanh(x: Tensor) -> Tensor:
    return activation(x, "tanh")


def sigmoid(x: Tensor) -> Tensor:
    return activation(x, "sigmoid")


def softmax_rows(x: Tensor) -> Tensor:
    """Row-wise softmax with max-subtraction; rank-1 input treated as one row."""
    flat = x.data.ndim == 1
    z = x.data.reshape(1, -1) if flat else x.data
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=1, keepdims=True)
    y_out = y.reshape(x.shape) if flat else y
    out = _make(y_out.astype(x.data.dtype), (x,), lambda: None)

    def back():
        if x.requires_grad:
            g = out.grad.reshape(1, -1) if flat else out.grad
            dot = (g * y).sum(axis=1, keepdims=True)
            gx = y * (g - dot)
            x._accumulate(gx.reshape(x.shape).astype(x.data.dtype))

    out._backward = back if out._parents else None
    return out


def conv1d_depthwise(e: Tensor, weights: Tensor, bias: Tensor, k: int) -> Tensor:
    """Channel-wise 1D convolution with 'same' zero padding.

    e: [n, d]; weights: [d, k]; bias: [d]. Channel j of the output depends
    only on channel j of the input (groups == d).
    """
    if k % 2 == 0:
        raise ConfigurationError(f"kernel size must be odd, got {k}")
    if e.data.ndim != 2 or weights.shape != (e.shape[1], k):
        raise DimensionError(
            f"depthwise shapes inconsistent: input {e.shape}, weights {weights.shape}, k={k}"
        )
    n, d = e.shape
    pad = (k - 1) // 2
    padded = np.zeros((n + 2 * pad, d), dtype=e.data.dtype)
    padded[pad : pad + n] = e.data
    y = np.zeros((n, d), dtype=e.data.dtype)
    for i in range(k):
        y += padded[i : i + n] * weights.data[:, i]
    y += bias.data
    out = _make(y, (e, weights, bias), lambda: None)

    def back():
        g = out.grad
        if weights.requires_grad:
            gw = np.zeros_like(weights.data)
            for i in range(k):
                gw[:, i] = (padded[i : i + n] * g).sum(axis=0)
            weights._accumulate(gw)
        if bias.requires_grad:
            bias._accumulate(g.sum(axis=0))
        if e.requires_grad:
            gp = np.zeros_like(padded)
            for i in range(k):
                gp[i : i + n] += g * weights.data[:, i]
            e._accumulate(gp[pad : pad + n])

    out._backward = back if out._parents else None
    return out


def conv1d_pointwise(v: Tensor, weights: Tensor, bias: Tensor) -> Tensor:
    """Per-position projection across channels (k=1 convolution)."""
    if v.data.ndim != 2 or weights.shape[0] != v.shape[1]:
        raise DimensionError(f"pointwise shape mismatch: {v.shape} x {weights.shape}")
    return add(matmul(v, weights), bias)


def conv1d_standard(e: Tensor, weights: Tensor, bias: Tensor) -> Tensor:
    """Full (non-grouped) 1D convolution, 'same' padding.

    weights: [k, d, c] mixing all input channels at every tap.
    """
    if weights.data.ndim != 3 or weights.shape[1] != e.shape[1]:
        raise DimensionError(f"conv shape mismatch: {e.shape} x {weights.shape}")
    k = weights.shape[0]
    if k % 2 == 0:
        raise ConfigurationError(f"kernel size must be odd, got {k}")
    n, d = e.shape
    c = weights.shape[2]
    pad = (k - 1) // 2
    padded = np.zeros((n + 2 * pad, d), dtype=e.data.dtype)
    padded[pad : pad + n] = e.data
    y = np.zeros((n, c), dtype=e.data.dtype)
    for i in range(k):
        y += padded[i : i + n] @ weights.data[i]
    y += bias.data
    out = _make(y, (e, weights, bias), lambda: None)

    def back():
        g = out.grad
        if weights.requires_grad:
            gw = np.zeros_like(weights.data)
            for i in range(k):
                gw[i] = padded[i : i + n].T @ g
            weights._accumulate(gw)
        if bias.requires_grad:
            bias._accumulate(g.sum(axis=0))
        if e.requires_grad:
            gp = np.zeros_like(padded)
            for i in range(k):
                gp[i : i + n] += g @ weights.data[i].T
            e._accumulate(gp[pad : pad + n])

    out._backward = back if out._parents else None
    return out


def max_over_time(h: Tensor) -> Tensor:
    """Per-channel max over the temporal (row) axis; ties route to the first row."""
    if h.data.ndim != 2 or h.shape[0] == 0:
        raise DimensionError(f"max_over_time needs a non-empty [n, c] input, got {h.shape}")
    idx = h.data.argmax(axis=0)  # first argmax on ties
    y = h.data[idx, np.arange(h.shape[1])]
    out = _make(y, (h,), lambda: None)

    def back():
        if h.requires_grad:
            g = np.zeros_like(h.data)
            g[idx, np.arange(h.shape[1])] = out.grad
            h._accumulate(g)

    out._backward = back if out._parents else None
    return out


EPS_LOG = 1e-12


def cross_entropy(y_hat: Tensor, y_onehot: Tensor) -> Tensor:
    """-sum(y * log(y_hat + eps)) for a one-hot label vector."""
    y = y_onehot.data.reshape(-1)
    if not (np.isclose(y.sum(), 1.0) and set(np.unique(y)) <= {0.0, 1.0}):
        raise ValueError(f"label vector is not one-hot: {y}")
    p = y_hat.data.reshape(-1)
    loss = -float(np.sum(y * np.log(p.astype(np.float64) + EPS_LOG)))
    out = _make(np.asarray(loss, dtype=y_hat.data.dtype), (y_hat,), lambda: None)

    def back():
        if y_hat.requires_grad:
            g = (-y / (p + EPS_LOG)) * out.grad.reshape(())
            y_hat._accumulate(g.reshape(y_hat.shape).astype(y_hat.data.dtype))

    out._backward = back if out._parents else None
    return out


def tsum(x: Tensor) -> Tensor:
    out = _make(np.asarray(x.data.sum(), dtype=x.data.dtype), (x,), lambda: None)

    def back():
        if x.requires_grad:
            x._accumulate(np.full_like(x.data, out.grad.reshape(())))

    out._backward = back if out._parents else None
    return out


def gather_rows(table: Tensor, ids: Sequence[int]) -> Tensor:
    idx = np.asarray(ids, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= table.shape[0]):
        raise IndexError(f"id out of range for table with {table.shape[0]} rows")
    out = _make(table.data[idx], (table,), lambda: None)

    def back():
        if table.requires_grad:
            g = np.zeros_like(table.data)
            np.add.at(g, idx, out.grad)
            table._accumulate(g)

    out._backward = back if out._parents else None
    return out


def slice2d(x: Tensor, r0: int, r1: int, c0: int, c1: int) -> Tensor:
    out = _make(x.data[r0:r1, c0:c1], (x,), lambda: None)

    def back():
        if x.requires_grad:
            g = np.zeros_like(x.data)
            g[r0:r1, c0:c1] = out.grad
            x._accumulate(g)

    out._backward = back if out._parents else None
    return out


def concat_rows(parts: Sequence[Tensor]) -> Tensor:
    out = _make(np.concatenate([p.data for p in parts], axis=0), tuple(parts), lambda: None)

    def back():
        r = 0
        for p in parts:
            nr = p.shape[0]
            if p.requires_grad:
                p._accumulate(out.grad[r : r + nr])
            r += nr

    out._backward = back if out._parents else None
    return out


def concat_cols(parts: Sequence[Tensor]) -> Tensor:
    out = _make(np.concatenate([p.data for p in parts], axis=1), tuple(parts), lambda: None)

    def back():
        c = 0
        for p in parts:
            nc = p.shape[1]
            if p.requires_grad:
                p._accumulate(out.grad[:, c : c + nc])
            c += nc

    out._backward = back if out._parents else None
    return out


def cosine_rows(a: Tensor, p: Tensor) -> Tensor:
    """Cosine similarity of every row of a [n, d] against every row of p [m, d].

    Rows of `a` with zero norm yield an all-zero output row (and zero gradient).
    """
    if a.data.ndim != 2 or p.data.ndim != 2 or a.shape[1] != p.shape[1]:
        raise DimensionError(f"cosine shape mismatch: {a.shape} x {p.shape}")
    an = np.linalg.norm(a.data, axis=1)  # [n]
    pn = np.linalg.norm(p.data, axis=1)  # [m]
    dots = a.data @ p.data.T  # [n, m]
    denom = np.outer(an, pn)
    safe = denom > 0
    y = np.where(safe, dots / np.where(safe, denom, 1.0), 0.0) \
        .astype(np.result_type(a.data, p.data))
    out = _make(y, (a, p), lambda: None)

    def back():
        g = out.grad * safe
        if a.requires_grad:
            an_safe = np.where(an > 0, an, 1.0)
            pn_safe = np.where(pn > 0, pn, 1.0)
            # d cos / d a_i = p_e/(|a||p|) - cos * a_i/|a|^2
            term1 = (g / (an_safe[:, None] * pn_safe[None, :])) @ p.data
            term2 = (g * y).sum(axis=1, keepdims=True) * a.data / (an_safe**2)[:, None]
            a._accumulate((term1 - term2).astype(a.data.dtype))
        if p.requires_grad:
            an_safe = np.where(an > 0, an, 1.0)
            pn_safe = np.where(pn > 0, pn, 1.0)
            term1 = (g / (an_safe[:, None] * pn_safe[None, :])).T @ a.data
            term2 = (g * y).sum(axis=0)[:, None] * p.data / (pn_safe**2)[:, None]
            p._accumulate((term1 - term2).astype(p.data.dtype))

    out._backward = back if out._parents else None
    return out


def dropout(x: Tensor, rate: float, rng: np.random.Generator, train: bool) -> Tensor:
    """Inverted-scaling dropout; identity when not training or rate == 0."""
    if not train or rate <= 0.0:
        return x
    mask = (rng.random(x.shape) >= rate).astype(x.data.dtype) / x.data.dtype.type(1.0 - rate)
    return mul(x, constant(mask))


class ParameterStore:
    """Ordered name -> trainable Tensor map with seeded initialization."""

    def __init__(self, rng_seed: int = 0):
        self.entries: "OrderedDict[str, Tensor]" = OrderedDict()
        self.rng_seed = rng_seed
        self._rng = np.random.default_rng(rng_seed)

    def add(self, name: str, shape: Sequence[int], fan_in: int | None = None,
            init: np.ndarray | None = None) -> Tensor:
        if name in self.entries:
            raise KeyError(f"duplicate parameter name {name!r}")
        if init is not None:
            data = np.asarray(init, dtype=np.float32).reshape(shape)
        elif fan_in is None:
            data = np.zeros(shape, dtype=np.float32)
        else:
            bound = float(np.sqrt(1.0 / max(fan_in, 1)))
            data = self._rng.uniform(-bound, bound, size=shape).astype(np.float32)
        # parameters stay float32 regardless of the active precision mode
        t = Tensor(data, requires_grad=True, dtype=np.float32)
        self.entries[name] = t
        return t

    def __getitem__(self, name: str) -> Tensor:
        return self.entries[name]

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def __iter__(self):
        return iter(self.entries.items())

    def names(self) -> list[str]:
        return list(self.entries)

    def total_params(self) -> int:
        return sum(t.data.size for t in self.entries.values())

    def zero_grad(self) -> None:
        for t in self.entries.values():
            t.zero_grad()

    def copy(self) -> "ParameterStore":
        dup = ParameterStore(self.rng_seed)
        for name, t in self.entries.items():
            dup.add(name, t.shape, init=t.data.copy())
        return dup

    # -- checkpoint format: magic "CKPT", version u32, count u32; per entry:
    #    name-length u16, utf-8 name, rank u8, dims u32*rank, float32 payload.
    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(b"CKPT")
            fh.write(struct.pack("<II", 1, len(self.entries)))
            for name, t in self.entries.items():
                nb = name.encode("utf-8")
                fh.write(struct.pack("<H", len(nb)))
                fh.write(nb)
                fh.write(struct.pack("<B", t.data.ndim))
                for dim in t.shape:
                    fh.write(struct.pack("<I", dim))
                fh.write(t.data.astype("<f4").tobytes())

    @classmethod
    def load(cls, path) -> "ParameterStore":
        with open(path, "rb") as fh:
            blob = fh.read()
        if blob[:4] != b"CKPT":
            raise ValueError(f"bad checkpoint magic {blob[:4]!r}")
        version, count = struct.unpack_from("<II", blob, 4)
        if version != 1:
            raise ValueError(f"unsupported checkpoint version {version}")
        store = cls()
        off = 12
        for _ in range(count):
            (nlen,) = struct.unpack_from("<H", blob, off)
            off += 2
            name = blob[off : off + nlen].decode("utf-8")
            off += nlen
            (rank,) = struct.unpack_from("<B", blob, off)
            off += 1
            dims = struct.unpack_from(f"<{rank}I", blob, off)
            off += 4 * rank
            size = int(np.prod(dims)) if rank else 1
            data = np.frombuffer(blob, dtype="<f4", count=size, offset=off).reshape(dims)
            off += 4 * size
            store.add(name, dims, init=data.copy())
        return store


def finite_difference_check(f: Callable[[], Tensor], store: ParameterStore,
                            eps: float = 1e-3) -> float:
    """Max relative error between analytic grads of f() and central differences.

    f rebuilds the forward graph from the store's current values on every
    call. Relative error per coordinate is
    |analytic - numeric| / (|analytic| + |numeric| + 1e-8). The objective
    is evaluated in float64 (see `precision`); parameters stay float32.
    """
    saved = {name: t.data for name, t in store}
    try:
        with precision(np.float64):
            # leaves are widened too, so perturbations by eps are exact
            for _, t in store:
                t.data = t.data.astype(np.float64)
            store.zero_grad()
            loss = f()
            loss.backward()
            analytic = {name: (t.grad.copy() if t.grad is not None
                               else np.zeros(t.shape))
                        for name, t in store}
            worst = 0.0
            with no_grad():
                for name, t in store:
                    flat = t.data.reshape(-1)
                    g = analytic[name].reshape(-1)
                    for i in range(flat.size):
                        orig = flat[i]
                        flat[i] = orig + eps
                        fp = float(f().data)
                        flat[i] = orig - eps
                        fm = float(f().data)
                        flat[i] = orig
                        if not (np.isfinite(fp) and np.isfinite(fm)):
                            raise FloatingPointError(
                                f"non-finite objective while perturbing {name}")
                        numeric = (fp - fm) / (2.0 * eps)
                        err = abs(g[i] - numeric) / (abs(g[i]) + abs(numeric) + 1e-8)
                        worst = max(worst, err)
    finally:
        for name, t in store:
            t.data = saved[name]
            t.grad = None
    return worst
