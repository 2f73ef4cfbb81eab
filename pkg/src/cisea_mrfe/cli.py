"""Command-line surface tying the modules together.

Subcommands: train, evaluate, augment, instruct, ablate, sweep, bench,
gradcheck, export-synthetic. Configuration precedence is
defaults < config file < command-line flags.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import training
from .augmentation import OfflineParaphraseProvider, SynonymProvider, augment_corpus
from .data import (
    LABEL_PRESETS,
    LabeledCorpus,
    keyword_judge,
    load_csv,
    make_synthetic_corpus,
    save_csv,
)
from .instruction import DOMAIN_DIRECTIVES, InstructionTemplate, apply_instruction
from .model import EncodedSample, ModelConfig, build_params, make_variant, sample_loss
from .tensor import finite_difference_check
from .training import (
    TrainConfig,
    evaluate,
    format_report_table,
    load_checkpoint,
    profile,
    run_ablation,
    save_checkpoint,
    split,
    sweep,
    train,
    write_history_csv,
    write_report_csv,
)

# every configurable key with its documented default; unknown keys are
# rejected when reading a config file
CONFIG_DEFAULTS: dict[str, str] = {
    "variant": "cisea_mrfe",
    "kernels": "1,3,5,7",
    "fusion": "sequential",
    "embed_dim": "32",
    "conv_channels": "32",
    "hidden": "16",
    "attn_dim": "8",
    "n_emotions": "8",
    "classes": "2",
    "max_len": "64",
    "dropout": "0.1",
    "gate_on": "1",
    "head_input": "maxpool",
    "epochs": "20",
    "batch_size": "64",
    "learning_rate": "1e-3",
    "weight_decay": "1e-5",
    "seed": "0",
    "vocab_size": "20000",
    "augment_k": "3",
    "use_ci": "1",
    "use_sea": "1",
    "domain": "product",
}


class ConfigError(ValueError):
    pass


def read_config_file(path) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in CONFIG_DEFAULTS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value.strip()
    return out


def resolve_config(args) -> dict[str, str]:
    merged = dict(CONFIG_DEFAULTS)
    if getattr(args, "config", None):
        merged.update(read_config_file(args.config))
    flag_map = {
        "variant": "variant", "kernels": "kernels", "fusion": "fusion",
        "embed_dim": "embed_dim", "conv_channels": "conv_channels",
        "hidden": "hidden", "attn_dim": "attn_dim", "n_emotions": "n_emotions",
        "classes": "classes", "max_len": "max_len", "dropout": "dropout",
        "epochs": "epochs", "batch_size": "batch_size",
        "learning_rate": "learning_rate", "weight_decay": "weight_decay",
        "seed": "seed", "augment_k": "augment_k", "domain": "domain",
    }
    for attr, key in flag_map.items():
        value = getattr(args, attr, None)
        if value is not None:
            merged[key] = str(value)
    if getattr(args, "no_ci", False):
        merged["use_ci"] = "0"
    if getattr(args, "no_sea", False):
        merged["use_sea"] = "0"
    return merged


def model_config_from(merged: dict[str, str]) -> ModelConfig:
    overrides = dict(
        use_ci=bool(int(merged["use_ci"])),
        kernels=tuple(int(k) for k in merged["kernels"].split(",")),
        fusion=merged["fusion"],
        embed_dim=int(merged["embed_dim"]),
        conv_channels=int(merged["conv_channels"]),
        hidden=int(merged["hidden"]),
        attn_dim=int(merged["attn_dim"]),
        n_emotions=int(merged["n_emotions"]),
        classes=int(merged["classes"]),
        max_len=int(merged["max_len"]),
        dropout=float(merged["dropout"]),
        gate_on=bool(int(merged["gate_on"])),
        head_input=merged["head_input"],
    )
    variant = merged["variant"]
    if variant != "ci_mrfe":  # ci_mrfe is the w/o-SEA variant by definition
        overrides["use_sea"] = bool(int(merged["use_sea"]))
    return make_variant(variant, **overrides)


def train_config_from(merged: dict[str, str]) -> TrainConfig:
    return TrainConfig(
        epochs=int(merged["epochs"]),
        batch_size=int(merged["batch_size"]),
        learning_rate=float(merged["learning_rate"]),
        weight_decay=float(merged["weight_decay"]),
        seed=int(merged["seed"]),
        vocab_size=int(merged["vocab_size"]),
        augment_k=int(merged["augment_k"]),
    )


def _load_corpus(args, merged) -> LabeledCorpus:
    if getattr(args, "data", None):
        labels = LABEL_PRESETS["stars5"] if int(merged["classes"]) == 5 \
            else LABEL_PRESETS["binary"]
        return load_csv(args.data, label_names=labels, domain=merged["domain"])
    return make_synthetic_corpus(n_per_class=getattr(args, "n_per_class", None) or 200,
                                 classes=int(merged["classes"]),
                                 seed=int(merged["seed"]))


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--variant", choices=["cisea_sade", "cisea_eece", "ci_mrfe", "cisea_mrfe"])
    p.add_argument("--kernels", help="comma-separated odd kernel sizes, e.g. 1,3,5,7")
    p.add_argument("--fusion", choices=["sequential", "attention_stack", "summation"])
    p.add_argument("--max-len", dest="max_len", type=int)
    p.add_argument("--embed-dim", dest="embed_dim", type=int)
    p.add_argument("--conv-channels", dest="conv_channels", type=int)
    p.add_argument("--hidden", type=int)
    p.add_argument("--attn-dim", dest="attn_dim", type=int)
    p.add_argument("--classes", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--weight-decay", dest="weight_decay", type=float)
    p.add_argument("--dropout", type=float)
    p.add_argument("--augment-k", dest="augment_k", type=int)
    p.add_argument("--domain", choices=sorted(DOMAIN_DIRECTIVES))
    p.add_argument("--no-ci", action="store_true", help="disable instruction templating")
    p.add_argument("--no-sea", action="store_true", help="disable augmentation")
    p.add_argument("--data", help="CSV corpus path (default: synthetic corpus)")
    p.add_argument("--n-per-class", dest="n_per_class", type=int)
    p.add_argument("--embeddings", help="contextual embedding (CEMB) file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cisea-mrfe")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("train", "ablate", "gradcheck", "bench"):
        p = sub.add_parser(name)
        _add_common_flags(p)

    p = sub.add_parser("evaluate")
    _add_common_flags(p)
    p.add_argument("--checkpoint", required=True, help="checkpoint directory")

    p = sub.add_parser("sweep")
    _add_common_flags(p)
    p.add_argument("--axis", required=True, choices=["kernels", "max_len", "fusion"])
    p.add_argument("--values", help="comma-separated values; ';' separates kernel sets")

    p = sub.add_parser("augment")
    _add_common_flags(p)
    p.add_argument("--paraphrases", help="offline paraphrase exchange CSV")

    p = sub.add_parser("instruct")
    _add_common_flags(p)
    p.add_argument("--text", help="single review to render")
    p.add_argument("--response", help="label response slot")
    p.add_argument("--identifier", help="sentiment identifier slot")

    p = sub.add_parser("export-synthetic")
    _add_common_flags(p)

    return parser


def cmd_train(args, merged) -> int:
    corpus = _load_corpus(args, merged)
    model_cfg = model_config_from(merged)
    train_cfg = train_config_from(merged)
    result = train(model_cfg, train_cfg, corpus)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_checkpoint(out / "checkpoint", result.checkpoint)
    write_history_csv(out / "history.csv", result.history)
    _, _, test_samples = split(corpus.samples, train_cfg.split_ratios, train_cfg.seed)
    report = evaluate(result.checkpoint, test_samples)
    write_report_csv(out / "report.csv", [("test", report)])
    print(format_report_table([("test", report)], title=f"variant={model_cfg.variant}"))
    return 0


def cmd_evaluate(args, merged) -> int:
    checkpoint = load_checkpoint(args.checkpoint)
    corpus = _load_corpus(args, merged)
    train_cfg = train_config_from(merged)
    _, _, test_samples = split(corpus.samples, train_cfg.split_ratios, train_cfg.seed)
    report = evaluate(checkpoint, test_samples)
    print(format_report_table([("test", report)]))
    return 0


def cmd_ablate(args, merged) -> int:
    corpus = _load_corpus(args, merged)
    model_cfg = model_config_from(merged)
    train_cfg = train_config_from(merged)
    rows = run_ablation(model_cfg, train_cfg, corpus)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table_rows = []
    for name, checkpoint, report in rows:
        slug = name.replace("/", "_").replace(" ", "_").replace("=", "").replace(",", "-") \
            .replace("[", "").replace("]", "")
        save_checkpoint(out / f"checkpoint_{slug}", checkpoint)
        table_rows.append((name, report))
    write_report_csv(out / "ablation.csv", table_rows)
    text = format_report_table(table_rows, title="Ablation grid")
    (out / "ablation.txt").write_text(text, encoding="utf-8")
    print(text)
    return 0


def cmd_sweep(args, merged) -> int:
    corpus = _load_corpus(args, merged)
    model_cfg = model_config_from(merged)
    train_cfg = train_config_from(merged)
    if args.values:
        if args.axis == "kernels":
            values = [tuple(int(k) for k in group.split(",")) for group in args.values.split(";")]
        elif args.axis == "max_len":
            values = [int(v) for v in args.values.split(",")]
        else:
            values = args.values.split(",")
    else:
        values = {"kernels": list(training.KERNEL_SWEEP_CONFIGS),
                  "max_len": list(training.LENGTH_SWEEP_VALUES),
                  "fusion": ["sequential", "attention_stack", "summation"]}[args.axis]
    rows = sweep(args.axis, values, model_cfg, train_cfg, corpus)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    named = [(str(v), r) for v, r in rows]
    write_report_csv(out / f"sweep_{args.axis}.csv", named)
    text = format_report_table(named, title=f"Sweep over {args.axis}")
    (out / f"sweep_{args.axis}.txt").write_text(text, encoding="utf-8")
    print(text)
    return 0


def cmd_bench(args, merged) -> int:
    corpus = _load_corpus(args, merged)
    model_cfg = model_config_from(merged)
    train_cfg = train_config_from(merged)
    short = replace(train_cfg, epochs=min(train_cfg.epochs, 2))
    result = train(model_cfg, short, corpus)
    _, _, test_samples = split(corpus.samples, train_cfg.split_ratios, train_cfg.seed)
    stats = profile(result.checkpoint, test_samples, repetitions=10)
    print(f"params        : {stats['param_count']}")
    print(f"flops (n={stats['reference_length']}) : {stats['flops']}")
    print(f"latency ms    : {stats['latency_ms_mean']:.3f} +/- {stats['latency_ms_std']:.3f}")
    return 0


def cmd_gradcheck(args, merged) -> int:
    # micro configuration keeps the coordinate-wise check under a minute
    cfg = ModelConfig(variant="cisea_mrfe", embed_dim=8, conv_channels=6, hidden=4,
                      attn_dim=3, n_emotions=3, classes=2, max_len=16, dropout=0.0)
    seed = int(merged["seed"])
    rng = np.random.default_rng(seed)
    vocab_size = 12
    n = 6
    store = build_params(cfg, vocab_size, seed)
    ids = [int(i) for i in rng.integers(0, vocab_size, size=n)]
    tokens = ["tok"] * (n - 1) + ["not"]
    sample = EncodedSample(ids=ids, tokens=tokens, label=1)
    err = finite_difference_check(lambda: sample_loss(sample, cfg, store), store)
    print(f"max relative gradient error: {err:.3e}")
    return 0 if err < 1e-3 else 1


def cmd_augment(args, merged) -> int:
    corpus = _load_corpus(args, merged)
    provider = OfflineParaphraseProvider(args.paraphrases) if args.paraphrases \
        else SynonymProvider()
    judge = keyword_judge if len(corpus.label_names) == 2 else None
    augmented, stats = augment_corpus(corpus.samples, provider,
                                      int(merged["augment_k"]), judge,
                                      seed=int(merged["seed"]))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_csv(out / "augmented.csv",
             LabeledCorpus(samples=augmented, label_names=corpus.label_names,
                           domain=corpus.domain))
    print(f"proposed={stats['proposed']} retained={stats['retained']} "
          f"rate={stats['retention_rate']:.2f} per_class={stats['per_class']}")
    return 0


def cmd_instruct(args, merged) -> int:
    if args.text:
        tmpl = InstructionTemplate(pattern_id="cli", domain=merged["domain"]) \
            if getattr(args, "domain", None) else InstructionTemplate(pattern_id="cli")
        print(apply_instruction(args.text, tmpl=tmpl, r=args.response, i=args.identifier))
        return 0
    # no text: echo the reference rendering
    print(apply_instruction("The restaurant was fantastic.",
                            r="The review is positive", i="fantastic"))
    return 0


def cmd_export_synthetic(args, merged) -> int:
    corpus = make_synthetic_corpus(
        n_per_class=getattr(args, "n_per_class", None) or 200,
        classes=int(merged["classes"]), seed=int(merged["seed"]))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_csv(out / "synthetic.csv", corpus)
    print(f"wrote {len(corpus)} samples to {out / 'synthetic.csv'}")
    return 0


COMMANDS = {
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "ablate": cmd_ablate,
    "sweep": cmd_sweep,
    "bench": cmd_bench,
    "gradcheck": cmd_gradcheck,
    "augment": cmd_augment,
    "instruct": cmd_instruct,
    "export-synthetic": cmd_export_synthetic,
}


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        workers = os.environ.get("MRFE_NUM_THREADS")
        if workers is not None:
            training.set_num_workers(int(workers))
        merged = resolve_config(args)
        return COMMANDS[args.command](args, merged)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))
