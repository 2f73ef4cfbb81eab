"""Variant assembly: SADE-only, EECE-only, and the full pipeline with
sequential or parallel (summation / attention-stack) stream fusion, plus
the max-pool + softmax prediction head."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import eece as eece_mod
from . import sade as sade_mod
from .eece import NegationRules
from .embedding import embed
from .sade import SadeConfig
from .tensor import (
    ConfigurationError,
    ParameterStore,
    Tensor,
    add,
    constant,
    conv1d_standard,
    cross_entropy,
    dropout,
    matmul,
    max_over_time,
    softmax_rows,
)

VARIANTS = ("cisea_sade", "cisea_eece", "ci_mrfe", "cisea_mrfe")
FUSION_MODES = ("sequential", "attention_stack", "summation")


@dataclass(frozen=True)
class ModelConfig:
    variant: str = "cisea_mrfe"
    use_ci: bool = True
    use_sea: bool = True
    use_sade: bool = True
    use_eece: bool = True
    kernels: tuple[int, ...] = (1, 3, 5, 7)
    fusion: str = "sequential"
    embed_dim: int = 32  # d
    conv_channels: int = 32  # c
    hidden: int = 16  # h per direction
    attn_dim: int = 8  # d_a
    n_emotions: int = 8
    classes: int = 2
    max_len: int = 64
    dropout: float = 0.1
    gate_on: bool = True
    head_input: str = "maxpool"  # maxpool over H~ | attention (pooled c~)
    negation: NegationRules = field(default_factory=NegationRules)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"unknown variant {self.variant!r}")
        if self.fusion not in FUSION_MODES:
            raise ConfigurationError(f"unknown fusion mode {self.fusion!r}")
        if self.classes < 2:
            raise ConfigurationError("need at least 2 classes")
        if self.variant == "cisea_sade" and self.use_eece:
            raise ConfigurationError("cisea_sade variant excludes EECE")
        if self.variant == "cisea_eece" and self.use_sade:
            raise ConfigurationError("cisea_eece variant excludes SADE")
        if self.variant == "ci_mrfe" and self.use_sea:
            raise ConfigurationError("ci_mrfe variant excludes SEA")


def make_variant(variant: str, **overrides) -> ModelConfig:
    """Config factory that keeps variant flags consistent."""
    flags = {
        "cisea_sade": dict(use_sea=True, use_sade=True, use_eece=False),
        "cisea_eece": dict(use_sea=True, use_sade=False, use_eece=True),
        "ci_mrfe": dict(use_sea=False, use_sade=True, use_eece=True),
        "cisea_mrfe": dict(use_sea=True, use_sade=True, use_eece=True),
    }[variant]
    flags.update(overrides)
    return ModelConfig(variant=variant, **flags)


@dataclass
class Prediction:
    probabilities: Tensor  # [C]
    predicted: int


def _sade_cfg(cfg: ModelConfig) -> SadeConfig:
    return SadeConfig(kernels=cfg.kernels, input_width=cfg.embed_dim,
                      out_channels=cfg.conv_channels)


def _eece_input_width(cfg: ModelConfig) -> int:
    if cfg.variant == "cisea_eece":
        return cfg.embed_dim  # BiLSTM runs over the embeddings directly
    if not cfg.use_sade:
        return cfg.conv_channels  # standard-conv replacement feeds EECE
    if cfg.fusion == "sequential":
        return cfg.conv_channels
    return cfg.embed_dim  # parallel streams: EECE reads the embeddings


def head_width(cfg: ModelConfig) -> int:
    if cfg.use_eece and cfg.use_sade and cfg.fusion != "sequential":
        return 2 * cfg.hidden  # common fused width f
    if cfg.use_eece:
        return 2 * cfg.hidden
    return cfg.conv_channels


def build_params(cfg: ModelConfig, vocab_size: int, seed: int,
                 embed_table: bool = True,
                 prototype_table: np.ndarray | None = None,
                 vocab=None) -> ParameterStore:
    store = ParameterStore(rng_seed=seed)
    if embed_table:
        store.add("embed.table", (vocab_size, cfg.embed_dim), fan_in=cfg.embed_dim)
    if cfg.use_sade:
        sade_mod.register_params(store, _sade_cfg(cfg))
    elif cfg.use_eece and cfg.variant != "cisea_eece":
        # "w/o SADE" ablation: one standard (non-grouped) k=3 convolution
        store.add("conv.w", (3, cfg.embed_dim, cfg.conv_channels), fan_in=3 * cfg.embed_dim)
        store.add("conv.b", (cfg.conv_channels,))
    if cfg.use_eece:
        proto = None
        if prototype_table is None and embed_table and vocab is not None:
            from .lexicons import EMOTION_SEEDS

            labels = list(EMOTION_SEEDS)[: cfg.n_emotions]
            labels += [f"emotion{i}" for i in range(len(labels), cfg.n_emotions)]
            proto = eece_mod.prototype_matrix(store["embed.table"].data, vocab,
                                              labels=labels)
        elif prototype_table is not None:
            proto = prototype_table
        eece_mod.register_eece_params(store, _eece_input_width(cfg), cfg.hidden, cfg.attn_dim,
                                      cfg.n_emotions, cfg.embed_dim,
                                      prototype_init=proto)
    if cfg.use_eece and cfg.use_sade and cfg.fusion != "sequential":
        f = 2 * cfg.hidden
        store.add("fuse.pv", (cfg.conv_channels, f), fan_in=cfg.conv_channels)
        store.add("fuse.ph", (2 * cfg.hidden, f), fan_in=2 * cfg.hidden)
        if cfg.fusion == "attention_stack":
            store.add("fuse.sv", (f, 1), fan_in=f)
            store.add("fuse.sh", (f, 1), fan_in=f)
    store.add("head.w", (head_width(cfg), cfg.classes), fan_in=head_width(cfg))
    store.add("head.b", (cfg.classes,))
    return store


def fuse_streams(v_pooled: Tensor, h_pooled: Tensor, mode: str,
                 store: ParameterStore) -> Tensor:
    """Combine pooled SADE and EECE vectors into one width-f feature row.

    summation: projected streams added. attention_stack: learned scalar
    scores softmaxed into two weights applied to the projections.
    """
    if mode == "sequential":
        raise ConfigurationError("sequential mode bypasses stream fusion")
    pv = matmul(v_pooled, store["fuse.pv"])  # [1, f]
    ph = matmul(h_pooled, store["fuse.ph"])  # [1, f]
    if mode == "summation":
        return add(pv, ph)
    s_v = matmul(pv, store["fuse.sv"])  # [1, 1]
    s_h = matmul(ph, store["fuse.sh"])
    from .tensor import concat_cols, mul, slice2d

    weights = softmax_rows(concat_cols([s_v, s_h]))  # [1, 2]
    w_v = slice2d(weights, 0, 1, 0, 1)
    w_h = slice2d(weights, 0, 1, 1, 2)
    return add(mul(pv, w_v), mul(ph, w_h))


def predict_head(features: Tensor, store: ParameterStore) -> Prediction:
    """features: [1, f] -> softmax class probabilities and argmax class."""
    logits = add(matmul(features, store["head.w"]), store["head.b"])  # [1, C]
    probs = softmax_rows(logits)
    flat = probs.data.reshape(-1)
    return Prediction(probabilities=probs, predicted=int(flat.argmax()))


def loss(pred: Prediction, label: int) -> Tensor:
    c = pred.probabilities.data.size
    if not 0 <= label < c:
        raise ValueError(f"label {label} out of range for {c} classes")
    onehot = np.zeros(c, dtype=np.float32)
    onehot[label] = 1.0
    return cross_entropy(pred.probabilities, constant(onehot.reshape(1, -1)))


@dataclass
class EncodedSample:
    ids: list[int]
    tokens: list[str]
    label: int
    embeddings: Tensor | None = None  # contextual mode: frozen [n, d]


def _reshape_row(v: Tensor) -> Tensor:
    """[c] -> [1, c] (gradient-preserving)."""
    from .tensor import _make

    out = _make(v.data.reshape(1, -1), (v,), lambda: None)

    def back():
        if v.requires_grad:
            v._accumulate(out.grad.reshape(v.shape))

    out._backward = back if out._parents else None
    return out


def forward(sample: EncodedSample, cfg: ModelConfig, store: ParameterStore,
            train_mode: bool = False,
            rng: np.random.Generator | None = None) -> tuple[Prediction, dict]:
    """Run one sample through the configured variant.

    Dropout (train_mode only, inverted scaling) is applied to the
    embeddings and to the pooled feature vector.
    """
    if len(sample.ids) > cfg.max_len:
        raise ConfigurationError(f"sequence length {len(sample.ids)} > max_len {cfg.max_len}")
    rng = rng or np.random.default_rng(0)
    if sample.embeddings is not None:
        e = sample.embeddings
    else:
        e = embed(sample.ids, store["embed.table"]).values
    e = dropout(e, cfg.dropout, rng, train_mode)
    inter: dict = {}

    h_pooled = v_pooled = None
    if cfg.use_sade:
        v = sade_mod.sade_forward(e, _sade_cfg(cfg), store)  # [n, c]
        inter["sade_out"] = v
    elif cfg.use_eece and cfg.variant != "cisea_eece":
        v = conv1d_standard(e, store["conv.w"], store["conv.b"])
        inter["conv_out"] = v
    else:
        v = e

    if cfg.use_eece:
        eece_in = v if (cfg.fusion == "sequential" or not cfg.use_sade) else e
        h_tilde, c_tilde, alpha = eece_mod.eece_forward(
            eece_in, e, sample.tokens, store, cfg.hidden, cfg.negation, cfg.gate_on)
        inter.update(h_tilde=h_tilde, c_tilde=c_tilde, alpha=alpha)
        if cfg.head_input == "attention":
            h_pooled = c_tilde
        else:
            h_pooled = _reshape_row(max_over_time(h_tilde))
    if cfg.use_sade and (not cfg.use_eece or cfg.fusion != "sequential"):
        v_pooled = _reshape_row(max_over_time(v))

    if h_pooled is not None and v_pooled is not None:
        features = fuse_streams(v_pooled, h_pooled, cfg.fusion, store)
    elif h_pooled is not None:
        features = h_pooled
    else:
        features = v_pooled
    features = dropout(features, cfg.dropout, rng, train_mode)
    pred = predict_head(features, store)
    inter["features"] = features
    return pred, inter


def sample_loss(sample: EncodedSample, cfg: ModelConfig, store: ParameterStore,
                train_mode: bool = False,
                rng: np.random.Generator | None = None) -> Tensor:
    pred, _ = forward(sample, cfg, store, train_mode=train_mode, rng=rng)
    return loss(pred, sample.label)
