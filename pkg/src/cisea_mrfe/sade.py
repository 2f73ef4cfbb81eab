"""Scale-adaptive depthwise encoder: per-kernel channel-wise convolutions
ReLU'd and averaged (ascending kernel order, for bit determinism), then a
shared pointwise projection to the output channel width."""

from __future__ import annotations

from dataclasses import dataclass

from .tensor import (
    ConfigurationError,
    ParameterStore,
    Tensor,
    add,
    conv1d_depthwise,
    conv1d_pointwise,
    relu,
    scale,
)


@dataclass(frozen=True)
class SadeConfig:
    kernels: tuple[int, ...]
    input_width: int  # d
    out_channels: int  # c

    def __post_init__(self):
        ks = self.kernels
        if not ks:
            raise ConfigurationError("kernel set must be non-empty")
        if any(k % 2 == 0 for k in ks):
            raise ConfigurationError(f"kernel sizes must be odd: {ks}")
        # normalized to ascending unique order; branch summation follows it
        object.__setattr__(self, "kernels", tuple(sorted(set(ks))))

    @property
    def window_size(self) -> int:
        return max(self.kernels)


def register_params(store: ParameterStore, cfg: SadeConfig, prefix: str = "sade") -> None:
    d, c = cfg.input_width, cfg.out_channels
    for k in cfg.kernels:
        store.add(f"{prefix}.dw{k}.w", (d, k), fan_in=k)
        store.add(f"{prefix}.dw{k}.b", (d,))
    store.add(f"{prefix}.pw.w", (d, c), fan_in=d)
    store.add(f"{prefix}.pw.b", (c,))


def sade_pre_projection(e: Tensor, cfg: SadeConfig, store: ParameterStore,
                        prefix: str = "sade") -> Tensor:
    """Mean over kernels of ReLU(depthwise_k(E)); [n, d], nonnegative."""
    acc: Tensor | None = None
    for k in cfg.kernels:
        branch = relu(conv1d_depthwise(e, store[f"{prefix}.dw{k}.w"],
                                       store[f"{prefix}.dw{k}.b"], k))
        acc = branch if acc is None else add(acc, branch)
    return scale(acc, 1.0 / len(cfg.kernels))


def sade_forward(e: Tensor, cfg: SadeConfig, store: ParameterStore,
                 prefix: str = "sade") -> Tensor:
    """[n, d] embeddings -> [n, c] multi-scale features."""
    v_pre = sade_pre_projection(e, cfg, store, prefix)
    return conv1d_pointwise(v_pre, store[f"{prefix}.pw.w"], store[f"{prefix}.pw.b"])


def sade_param_count(cfg: SadeConfig) -> int:
    d, c = cfg.input_width, cfg.out_channels
    return sum(d * (k + 1) for k in cfg.kernels) + d * c + c
