"""Training loop, metrics, statistical comparison, ablation runner,
sweeps, and the efficiency profiler."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.special import betainc

from . import model as model_mod
from .augmentation import SynonymProvider, augment_corpus
from .data import LabeledCorpus, keyword_judge
from .instruction import DOMAIN_DIRECTIVES, Vocab, apply_instruction, build_vocab, \
    tokenize, tokenize_words, DEFAULT_TEMPLATE, InstructionTemplate
from .model import EncodedSample, ModelConfig, forward, sample_loss
from .tensor import ParameterStore, no_grad, scale


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    batch_size: int = 64
    # the published fine-tuning rate (2e-5) barely moves a from-scratch
    # desk-scale model; 1e-3 is the working default here
    learning_rate: float = 1e-3
    weight_decay: float = 1e-5
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    split_ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    vocab_size: int = 20000
    augment_k: int = 3
    early_stop_dev_acc: float | None = None

    def __post_init__(self):
        if abs(sum(self.split_ratios) - 1.0) > 1e-9:
            raise ValueError(f"split ratios must sum to 1: {self.split_ratios}")
        if min(self.split_ratios) <= 0 or self.epochs < 0 or self.batch_size < 1:
            raise ValueError("train config values must be positive")


def split(samples, ratios=(0.8, 0.1, 0.1), seed: int = 0):
    """Deterministic shuffle then floor allocation, remainder to train."""
    if len(samples) < 10:
        raise ValueError(f"need >= 10 samples to split, got {len(samples)}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(samples))
    shuffled = [samples[i] for i in order]
    n = len(samples)
    n_dev = int(n * ratios[1])
    n_test = int(n * ratios[2])
    n_train = n - n_dev - n_test
    return (shuffled[:n_train], shuffled[n_train : n_train + n_dev],
            shuffled[n_train + n_dev :])


# ---------------------------------------------------------------- optimizer

def adamw_step(store: ParameterStore, state: dict, cfg: TrainConfig) -> None:
    """One AdamW update: decoupled weight decay applied separately from the
    bias-corrected Adam moment update."""
    for name, t in store:
        grad = t.grad if t.grad is not None else np.zeros_like(t.data)
        if name not in state:
            state[name] = {"m": np.zeros_like(t.data), "v": np.zeros_like(t.data), "t": 0}
        s = state[name]
        s["t"] += 1
        if cfg.weight_decay:
            t.data -= np.float32(cfg.learning_rate * cfg.weight_decay) * t.data
        s["m"] = cfg.beta1 * s["m"] + (1 - cfg.beta1) * grad
        s["v"] = cfg.beta2 * s["v"] + (1 - cfg.beta2) * grad * grad
        m_hat = s["m"] / (1 - cfg.beta1 ** s["t"])
        v_hat = s["v"] / (1 - cfg.beta2 ** s["t"])
        t.data -= (cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.eps)).astype(np.float32)


# ------------------------------------------------------------------ metrics

@dataclass
class EvalReport:
    accuracy: float
    macro_f1: float
    per_class: list[dict]  # precision / recall / f1 / support per class
    confusion: np.ndarray
    latency_ms_mean: float | None = None
    latency_ms_std: float | None = None
    param_count: int | None = None
    flops: int | None = None


def confusion_matrix(y_true, y_pred, n_classes: int) -> np.ndarray:
    conf = np.zeros((n_classes, n_classes), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        conf[t, p] += 1
    return conf


def report_from_confusion(conf: np.ndarray) -> EvalReport:
    total = conf.sum()
    accuracy = float(np.trace(conf) / total) if total else 0.0
    per_class = []
    f1s = []
    for c in range(conf.shape[0]):
        tp = float(conf[c, c])
        fp = float(conf[:, c].sum() - tp)
        fn = float(conf[c, :].sum() - tp)
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        per_class.append({"precision": precision, "recall": recall, "f1": f1,
                          "support": int(conf[c, :].sum())})
        f1s.append(f1)
    # unweighted mean of per-class F1 (macro)
    return EvalReport(accuracy=accuracy, macro_f1=float(np.mean(f1s)),
                      per_class=per_class, confusion=conf)


def welch_ttest(scores_a, scores_b) -> tuple[float, float]:
    """Welch's unequal-variance t with Welch-Satterthwaite df; two-sided
    p-value via the regularized incomplete beta function."""
    a = np.asarray(scores_a, dtype=np.float64)
    b = np.asarray(scores_b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise ValueError("each sample needs at least 2 values")
    va, vb = a.var(ddof=1), b.var(ddof=1)
    na, nb = a.size, b.size
    se2 = va / na + vb / nb
    diff = a.mean() - b.mean()
    if se2 == 0.0:
        return (0.0, 1.0) if diff == 0.0 else (math.inf * np.sign(diff), 0.0)
    t = diff / math.sqrt(se2)
    df = se2**2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return float(t), p


# ----------------------------------------------------------------- encoding

def instruct_text(text: str, domain: str) -> str:
    tmpl = InstructionTemplate(pattern_id=f"domain:{domain}", domain=domain) \
        if domain in DOMAIN_DIRECTIVES else DEFAULT_TEMPLATE
    return apply_instruction(text, tmpl=tmpl)


def encode_samples(samples, cfg: ModelConfig, vocab: Vocab, domain: str) -> list[EncodedSample]:
    out = []
    for text, label in samples:
        rendered = instruct_text(text, domain) if cfg.use_ci else text
        out.append(EncodedSample(ids=tokenize(rendered, vocab, cfg.max_len),
                                 tokens=tokenize_words(rendered, cfg.max_len),
                                 label=label))
    return out


# ----------------------------------------------------------------- training

@dataclass
class Checkpoint:
    store: ParameterStore
    vocab: Vocab
    model_cfg: ModelConfig
    label_names: list[str]
    domain: str = ""


@dataclass
class TrainResult:
    checkpoint: Checkpoint
    history: list[dict]  # epoch, train_loss, dev_acc
    augment_stats: dict | None = None


def save_checkpoint(directory, checkpoint: Checkpoint) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    checkpoint.store.save(directory / "params.ckpt")
    checkpoint.vocab.save(directory / "vocab.txt")
    cfg = checkpoint.model_cfg
    with open(directory / "model.cfg", "w", encoding="utf-8") as fh:
        fh.write(f"variant = {cfg.variant}\n")
        fh.write(f"use_ci = {int(cfg.use_ci)}\n")
        fh.write(f"use_sea = {int(cfg.use_sea)}\n")
        fh.write(f"use_sade = {int(cfg.use_sade)}\n")
        fh.write(f"use_eece = {int(cfg.use_eece)}\n")
        fh.write(f"kernels = {','.join(map(str, cfg.kernels))}\n")
        fh.write(f"fusion = {cfg.fusion}\n")
        fh.write(f"embed_dim = {cfg.embed_dim}\n")
        fh.write(f"conv_channels = {cfg.conv_channels}\n")
        fh.write(f"hidden = {cfg.hidden}\n")
        fh.write(f"attn_dim = {cfg.attn_dim}\n")
        fh.write(f"n_emotions = {cfg.n_emotions}\n")
        fh.write(f"classes = {cfg.classes}\n")
        fh.write(f"max_len = {cfg.max_len}\n")
        fh.write(f"dropout = {cfg.dropout!r}\n")
        fh.write(f"gate_on = {int(cfg.gate_on)}\n")
        fh.write(f"head_input = {cfg.head_input}\n")
        fh.write(f"labels = {','.join(checkpoint.label_names)}\n")
        fh.write(f"domain = {checkpoint.domain}\n")


def load_checkpoint(directory) -> Checkpoint:
    directory = Path(directory)
    kv: dict[str, str] = {}
    with open(directory / "model.cfg", encoding="utf-8") as fh:
        for line in fh:
            if "=" in line:
                key, _, value = line.partition("=")
                kv[key.strip()] = value.strip()
    cfg = ModelConfig(
        variant=kv["variant"],
        use_ci=bool(int(kv["use_ci"])),
        use_sea=bool(int(kv["use_sea"])),
        use_sade=bool(int(kv["use_sade"])),
        use_eece=bool(int(kv["use_eece"])),
        kernels=tuple(int(k) for k in kv["kernels"].split(",")),
        fusion=kv["fusion"],
        embed_dim=int(kv["embed_dim"]),
        conv_channels=int(kv["conv_channels"]),
        hidden=int(kv["hidden"]),
        attn_dim=int(kv["attn_dim"]),
        n_emotions=int(kv["n_emotions"]),
        classes=int(kv["classes"]),
        max_len=int(kv["max_len"]),
        dropout=float(kv["dropout"]),
        gate_on=bool(int(kv["gate_on"])),
        head_input=kv["head_input"],
    )
    return Checkpoint(store=ParameterStore.load(directory / "params.ckpt"),
                      vocab=Vocab.load(directory / "vocab.txt"),
                      model_cfg=cfg,
                      label_names=kv["labels"].split(","),
                      domain=kv.get("domain", ""))


# worker cap for inference; the CLI sets this from MRFE_NUM_THREADS
_NUM_WORKERS = 1


def set_num_workers(n: int) -> None:
    global _NUM_WORKERS
    if n < 1:
        raise ValueError(f"worker count must be >= 1, got {n}")
    _NUM_WORKERS = n


def _predict_one(checkpoint: Checkpoint, sample) -> int:
    pred, _ = forward(sample, checkpoint.model_cfg, checkpoint.store,
                      train_mode=False)
    return pred.predicted


def predict_all(checkpoint: Checkpoint, encoded) -> list[int]:
    with no_grad():
        if _NUM_WORKERS > 1 and len(encoded) > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=_NUM_WORKERS) as pool:
                return list(pool.map(lambda s: _predict_one(checkpoint, s), encoded))
        return [_predict_one(checkpoint, s) for s in encoded]


def train(model_cfg: ModelConfig, train_cfg: TrainConfig,
          corpus: LabeledCorpus) -> TrainResult:
    """Full training run: split, optional augmentation, vocab, AdamW loop
    with per-epoch dev accuracy; the best-dev parameter snapshot is kept
    (ties go to the earlier epoch)."""
    train_samples, dev_samples, test_samples = split(
        corpus.samples, train_cfg.split_ratios, train_cfg.seed)
    del test_samples  # held out; callers evaluate separately via the same split
    augment_stats = None
    if model_cfg.use_sea and train_cfg.augment_k > 0:
        judge = keyword_judge if len(corpus.label_names) == 2 else None
        train_samples, augment_stats = augment_corpus(
            train_samples, SynonymProvider(), train_cfg.augment_k, judge,
            seed=train_cfg.seed)
    rendered = [instruct_text(t, corpus.domain) if model_cfg.use_ci else t
                for t, _ in train_samples]
    vocab = build_vocab(rendered, train_cfg.vocab_size)
    store = model_mod.build_params(model_cfg, vocab.size, train_cfg.seed, vocab=vocab)
    checkpoint = Checkpoint(store=store, vocab=vocab, model_cfg=model_cfg,
                            label_names=corpus.label_names, domain=corpus.domain)

    encoded_train = encode_samples(train_samples, model_cfg, vocab, corpus.domain)
    encoded_dev = encode_samples(dev_samples, model_cfg, vocab, corpus.domain)

    shuffle_rng = np.random.default_rng(train_cfg.seed + 1)
    dropout_rng = np.random.default_rng(train_cfg.seed + 2)
    opt_state: dict = {}
    history: list[dict] = []
    best_acc, best_store = -1.0, store.copy()
    for epoch in range(train_cfg.epochs):
        order = shuffle_rng.permutation(len(encoded_train))
        losses = []
        for start in range(0, len(order), train_cfg.batch_size):
            batch = [encoded_train[i] for i in order[start : start + train_cfg.batch_size]]
            store.zero_grad()
            for sample in batch:
                loss_t = sample_loss(sample, model_cfg, store, train_mode=True,
                                     rng=dropout_rng)
                losses.append(loss_t.item())
                scale(loss_t, 1.0 / len(batch)).backward()
            adamw_step(store, opt_state, train_cfg)
        dev_preds = predict_all(checkpoint, encoded_dev)
        dev_acc = float(np.mean([p == s.label for p, s in zip(dev_preds, encoded_dev)])) \
            if encoded_dev else 0.0
        history.append({"epoch": epoch, "train_loss": float(np.mean(losses)) if losses else 0.0,
                        "dev_acc": dev_acc})
        if dev_acc > best_acc:
            best_acc, best_store = dev_acc, store.copy()
        if train_cfg.early_stop_dev_acc is not None and dev_acc >= train_cfg.early_stop_dev_acc:
            break
    checkpoint.store = best_store if train_cfg.epochs > 0 else store
    return TrainResult(checkpoint=checkpoint, history=history, augment_stats=augment_stats)


def evaluate(checkpoint: Checkpoint, test_samples) -> EvalReport:
    encoded = encode_samples(test_samples, checkpoint.model_cfg, checkpoint.vocab,
                             checkpoint.domain)
    preds = predict_all(checkpoint, encoded)
    conf = confusion_matrix([s.label for s in encoded], preds,
                            len(checkpoint.label_names))
    report = report_from_confusion(conf)
    report.param_count = checkpoint.store.total_params()
    return report


# ---------------------------------------------------------------- profiling

def flops_estimate(cfg: ModelConfig, n: int, vocab_size: int) -> int:
    """Analytic forward-pass FLOPs (multiply-accumulate = 2 FLOPs)."""
    del vocab_size  # table lookup is free
    d, c, h, da, ne, C = (cfg.embed_dim, cfg.conv_channels, cfg.hidden,
                          cfg.attn_dim, cfg.n_emotions, cfg.classes)
    total = 0
    if cfg.use_sade:
        for k in cfg.kernels:
            total += 2 * n * d * k  # depthwise branch
        total += 2 * n * d * c  # pointwise projection
    elif cfg.use_eece and cfg.variant != "cisea_eece":
        total += 2 * n * (3 * d) * c  # standard k=3 convolution
    if cfg.use_eece:
        lstm_in = model_mod._eece_input_width(cfg)
        total += n * 2 * (2 * 4 * h * (lstm_in + h))  # both directions
        two_h = 2 * h
        total += 2 * n * two_h * da + 2 * n * da + 2 * n * two_h  # attention
        total += 2 * n * d * ne  # prototype compatibility
        total += 2 * n * ne + 2 * n * two_h  # fusion scalar + gate
    f = model_mod.head_width(cfg)
    if cfg.use_sade and cfg.use_eece and cfg.fusion != "sequential":
        total += 2 * c * f + 2 * (2 * h) * f  # stream projections
    total += 2 * f * C  # head
    return total


def profile(checkpoint: Checkpoint, test_samples, repetitions: int = 10,
            warmups: int = 3) -> dict:
    """Exact parameter count, analytic FLOPs, and measured ms/sample
    (mean +/- std over `repetitions` timed passes after warmups)."""
    encoded = encode_samples(test_samples, checkpoint.model_cfg, checkpoint.vocab,
                             checkpoint.domain)
    if not encoded:
        raise ValueError("empty test set")
    for _ in range(warmups):
        predict_all(checkpoint, encoded)
    per_run_ms = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        predict_all(checkpoint, encoded)
        elapsed = time.perf_counter() - t0
        per_run_ms.append(1000.0 * elapsed / len(encoded))
    n_ref = int(np.mean([len(s.ids) for s in encoded]))
    return {
        "param_count": checkpoint.store.total_params(),
        "flops": flops_estimate(checkpoint.model_cfg, n_ref, checkpoint.vocab.size),
        "latency_ms_mean": float(np.mean(per_run_ms)),
        "latency_ms_std": float(np.std(per_run_ms)),
        "reference_length": n_ref,
    }


# ------------------------------------------------------- ablations & sweeps

ABLATION_ROWS = ("full", "w/o CI", "w/o SEA", "w/o SADE", "w/o EECE",
                 "single-k=3", "kernels [1,3,5]")


def ablation_grid(base: ModelConfig) -> list[tuple[str, ModelConfig]]:
    return [
        ("full", base),
        ("w/o CI", replace(base, use_ci=False)),
        ("w/o SEA", replace(base, use_sea=False)),
        ("w/o SADE", replace(base, use_sade=False)),
        ("w/o EECE", replace(base, use_eece=False)),
        ("single-k=3", replace(base, kernels=(3,))),
        ("kernels [1,3,5]", replace(base, kernels=(1, 3, 5))),
    ]


def run_ablation(base_cfg: ModelConfig, train_cfg: TrainConfig,
                 corpus: LabeledCorpus) -> list[tuple[str, Checkpoint, EvalReport]]:
    _, _, test_samples = split(corpus.samples, train_cfg.split_ratios, train_cfg.seed)
    rows = []
    for name, cfg in ablation_grid(base_cfg):
        result = train(cfg, train_cfg, corpus)
        report = evaluate(result.checkpoint, test_samples)
        rows.append((name, result.checkpoint, report))
    return rows


SWEEP_AXES = ("kernels", "max_len", "fusion")
KERNEL_SWEEP_CONFIGS = ((1, 3, 5), (1, 3, 7), (3, 5, 7), (3,), (5,), (1, 3, 5, 7))
LENGTH_SWEEP_VALUES = (32, 64, 128, 256, 512)


def sweep(axis: str, values, base_cfg: ModelConfig, train_cfg: TrainConfig,
          corpus: LabeledCorpus) -> list[tuple[object, EvalReport]]:
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")
    _, _, test_samples = split(corpus.samples, train_cfg.split_ratios, train_cfg.seed)
    rows = []
    for value in values:
        if axis == "kernels":
            cfg = replace(base_cfg, kernels=tuple(value))
        elif axis == "max_len":
            cfg = replace(base_cfg, max_len=int(value))
        else:
            cfg = replace(base_cfg, fusion=str(value))
        result = train(cfg, train_cfg, corpus)
        rows.append((value, evaluate(result.checkpoint, test_samples)))
    return rows


# ---------------------------------------------------------------- reporting

def write_history_csv(path, history) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "loss", "dev_acc"])
        for row in history:
            writer.writerow([row["epoch"], repr(row["train_loss"]), repr(row["dev_acc"])])


def write_report_csv(path, rows) -> None:
    """rows: iterable of (name, EvalReport)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "accuracy", "macro_f1"])
        for name, report in rows:
            writer.writerow([name, f"{report.accuracy:.4f}", f"{report.macro_f1:.4f}"])


def format_report_table(rows, title: str = "") -> str:
    width = max([len(str(name)) for name, _ in rows] + [len("Model")])
    lines = []
    if title:
        lines.append(title)
    lines.append(f"{'Model':<{width}}  {'Acc':>7}  {'M-F1':>7}")
    lines.append("-" * (width + 20))
    for name, report in rows:
        lines.append(f"{str(name):<{width}}  {100 * report.accuracy:7.2f}  "
                     f"{100 * report.macro_f1:7.2f}")
    return "\n".join(lines) + "\n"
