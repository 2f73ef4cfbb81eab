"""Emotion-evaluator context encoder.

BiLSTM over the incoming feature sequence, additive attention pooling,
softmax projection into emotion space, cosine compatibility between token
embeddings and emotion prototypes, negation/hedge modulation near cue
words, and gated residual fusion of the scalar emotion signal back into
the recurrent states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lexicons import EMOTION_SEEDS, HEDGE_CUES, NEGATION_CUES
from .tensor import (
    DimensionError,
    ParameterStore,
    Tensor,
    add,
    concat_cols,
    concat_rows,
    constant,
    cosine_rows,
    matmul,
    mul,
    sigmoid,
    slice2d,
    softmax_rows,
    tanh,
)


@dataclass(frozen=True)
class NegationRules:
    negation_cues: frozenset[str] = NEGATION_CUES
    hedge_cues: frozenset[str] = HEDGE_CUES
    window: int = 3
    attenuation: float = 0.5

    def __post_init__(self):
        if not (0.0 < self.attenuation < 1.0):
            raise ValueError(f"attenuation must be in (0, 1), got {self.attenuation}")
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")


@dataclass
class EmotionSpace:
    labels: list[str] = field(default_factory=lambda: list(EMOTION_SEEDS))

    @property
    def size(self) -> int:
        return len(self.labels)


def register_bilstm_params(store: ParameterStore, input_width: int, hidden: int,
                           prefix: str = "lstm") -> None:
    for direction in ("fwd", "bwd"):
        store.add(f"{prefix}.{direction}.wx", (input_width, 4 * hidden), fan_in=input_width)
        store.add(f"{prefix}.{direction}.wh", (hidden, 4 * hidden), fan_in=hidden)
        store.add(f"{prefix}.{direction}.b", (4 * hidden,))


def register_eece_params(store: ParameterStore, input_width: int, hidden: int,
                         attn_dim: int, n_emotions: int, embed_width: int,
                         prototype_init: np.ndarray | None = None) -> None:
    register_bilstm_params(store, input_width, hidden)
    two_h = 2 * hidden
    store.add("attn.w", (two_h, attn_dim), fan_in=two_h)
    store.add("attn.b", (attn_dim,))
    store.add("attn.v", (attn_dim, 1), fan_in=attn_dim)
    store.add("emo.w", (two_h, n_emotions), fan_in=two_h)
    store.add("emo.b", (n_emotions,))
    if prototype_init is not None:
        store.add("emo.proto", (n_emotions, embed_width), init=prototype_init)
    else:
        store.add("emo.proto", (n_emotions, embed_width), fan_in=embed_width)
    store.add("emo.logits", (n_emotions,))
    store.add("gate.w", (two_h, 1), fan_in=two_h)
    store.add("gate.b", (1,))


def prototype_matrix(table: np.ndarray, vocab, labels=None) -> np.ndarray:
    """Mean embedding of each emotion's seed words (snapshot at init).

    Seeds missing from the vocabulary are skipped; an emotion with no
    in-vocabulary seed gets a small deterministic nonzero vector.
    """
    labels = labels or list(EMOTION_SEEDS)
    d = table.shape[1]
    protos = np.zeros((len(labels), d), dtype=np.float32)
    for row, emotion in enumerate(labels):
        vecs = [table[vocab.id_of(w)] for w in EMOTION_SEEDS.get(emotion, [])
                if vocab.id_of(w) != 1]  # skip [UNK]
        if vecs:
            protos[row] = np.mean(vecs, axis=0)
        else:
            protos[row, row % d] = 0.1
    return protos


def load_emotion_lexicon(path) -> dict[str, list[str]]:
    """Parse 'emotion: word1 word2 ...' lines; '#' starts a comment."""
    out: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            name, _, words = line.partition(":")
            out[name.strip()] = words.split()
    return out


def _lstm_direction(v: Tensor, store: ParameterStore, hidden: int, prefix: str,
                    reverse: bool) -> list[Tensor]:
    n = v.shape[0]
    wx, wh, b = store[f"{prefix}.wx"], store[f"{prefix}.wh"], store[f"{prefix}.b"]
    h_prev = constant(np.zeros((1, hidden), dtype=np.float32))
    c_prev = constant(np.zeros((1, hidden), dtype=np.float32))
    order = range(n - 1, -1, -1) if reverse else range(n)
    states: list[Tensor] = [None] * n  # type: ignore[list-item]
    for t in order:
        x_t = slice2d(v, t, t + 1, 0, v.shape[1])
        z = add(add(matmul(x_t, wx), matmul(h_prev, wh)), b)
        i_g = sigmoid(slice2d(z, 0, 1, 0, hidden))
        f_g = sigmoid(slice2d(z, 0, 1, hidden, 2 * hidden))
        g_g = tanh(slice2d(z, 0, 1, 2 * hidden, 3 * hidden))
        o_g = sigmoid(slice2d(z, 0, 1, 3 * hidden, 4 * hidden))
        c_t = add(mul(f_g, c_prev), mul(i_g, g_g))
        h_t = mul(o_g, tanh(c_t))
        states[t] = h_t
        h_prev, c_prev = h_t, c_t
    return states


def bilstm_forward(v: Tensor, store: ParameterStore, hidden: int,
                   prefix: str = "lstm") -> Tensor:
    """[n, c] -> [n, 2h]; row t concatenates forward and backward states."""
    if v.shape[0] < 1:
        raise DimensionError("sequence must be non-empty")
    if v.shape[1] != store[f"{prefix}.fwd.wx"].shape[0]:
        raise DimensionError(
            f"input width {v.shape[1]} != lstm input {store[f'{prefix}.fwd.wx'].shape[0]}")
    fwd = _lstm_direction(v, store, hidden, f"{prefix}.fwd", reverse=False)
    bwd = _lstm_direction(v, store, hidden, f"{prefix}.bwd", reverse=True)
    return concat_cols([concat_rows(fwd), concat_rows(bwd)])


def attention_pool(h: Tensor, store: ParameterStore) -> tuple[Tensor, Tensor]:
    """Additive attention: returns (alpha [1, n] on the simplex, c [1, 2h])."""
    u = tanh(add(matmul(h, store["attn.w"]), store["attn.b"]))  # [n, d_a]
    scores = matmul(u, store["attn.v"])  # [n, 1]
    alpha = softmax_rows(transpose_scores(scores))  # [1, n]
    c = matmul(alpha, h)  # [1, 2h]
    return alpha, c


def transpose_scores(scores: Tensor) -> Tensor:
    """[n, 1] -> [1, n] view with gradient."""
    out_data = scores.data.T.copy()
    from .tensor import _make  # shared graph helper

    out = _make(out_data, (scores,), lambda: None)

    def back():
        if scores.requires_grad:
            scores._accumulate(out.grad.T.copy())

    out._backward = back if out._parents else None
    return out


def emotion_project(h: Tensor, store: ParameterStore) -> Tensor:
    """Per-position softmax over emotion logits; rows on the |E|-simplex."""
    return softmax_rows(add(matmul(h, store["emo.w"]), store["emo.b"]))


def emotion_compatibility(e_tokens: Tensor, store: ParameterStore) -> Tensor:
    """Cosine of each token embedding against each prototype; [n, |E|]."""
    return cosine_rows(e_tokens, store["emo.proto"])


def negation_mask(tokens: list[str], n_emotions: int, rules: NegationRules) -> np.ndarray:
    """Multiplier per position: -1 when a negation cue occurs in the
    preceding window, attenuation when a hedge does; reversal wins."""
    n = len(tokens)
    mask = np.ones((n, n_emotions), dtype=np.float32)
    for t in range(n):
        window = tokens[max(0, t - rules.window) : t]
        if any(tok in rules.negation_cues for tok in window):
            mask[t] = -1.0
        elif any(tok in rules.hedge_cues for tok in window):
            mask[t] = rules.attenuation
    return mask


def negation_modulate(y: Tensor, tokens: list[str], rules: NegationRules) -> Tensor:
    if y.shape[0] != len(tokens):
        raise DimensionError(f"{y.shape[0]} score rows vs {len(tokens)} tokens")
    return mul(y, constant(negation_mask(tokens, y.shape[1], rules)))


def fuse_residual(h: Tensor, y_mod: Tensor, alpha: Tensor, store: ParameterStore,
                  gate_on: bool) -> tuple[Tensor, Tensor]:
    """Gated residual fusion of the scalar emotion signal into H.

    s_t = sum_e alpha_e * y_mod[t, e], optionally gated by
    sigmoid(W_g h_t + b_g); H~ = H + s (broadcast over coordinates);
    c~ = alpha-weighted sum of H~ rows.
    """
    alpha_e = softmax_rows(store["emo.logits"])  # [|E|]
    s = matmul(y_mod, reshape_col(alpha_e))  # [n, 1]
    if gate_on:
        gate = sigmoid(add(matmul(h, store["gate.w"]), store["gate.b"]))  # [n, 1]
        s = mul(s, gate)
    h_tilde = add(h, s)  # broadcast [n, 2h] + [n, 1]
    c_tilde = matmul(alpha, h_tilde)  # [1, 2h]
    return h_tilde, c_tilde


def reshape_col(v: Tensor) -> Tensor:
    """Rank-1 [m] -> rank-2 [m, 1] with gradient."""
    from .tensor import _make

    out = _make(v.data.reshape(-1, 1), (v,), lambda: None)

    def back():
        if v.requires_grad:
            v._accumulate(out.grad.reshape(v.shape))

    out._backward = back if out._parents else None
    return out


def eece_forward(v: Tensor, e_tokens: Tensor, tokens: list[str],
                 store: ParameterStore, hidden: int, rules: NegationRules,
                 gate_on: bool = True) -> tuple[Tensor, Tensor, Tensor]:
    """Full pipeline: BiLSTM -> attention -> compatibility (on token
    embeddings) -> negation modulation -> gated residual fusion.

    Returns (H~ [n, 2h], c~ [1, 2h], alpha [1, n]). The per-position
    emotion distribution from `emotion_project` is diagnostic only and
    not part of the fused output.
    """
    if not (v.shape[0] == e_tokens.shape[0] == len(tokens)):
        raise DimensionError(
            f"inconsistent lengths: v {v.shape[0]}, embeddings {e_tokens.shape[0]}, "
            f"tokens {len(tokens)}")
    h = bilstm_forward(v, store, hidden)
    alpha, _ = attention_pool(h, store)
    y = emotion_compatibility(e_tokens, store)
    y_mod = negation_modulate(y, tokens, rules)
    h_tilde, c_tilde = fuse_residual(h, y_mod, alpha, store, gate_on)
    return h_tilde, c_tilde, alpha
