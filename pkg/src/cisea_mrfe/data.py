"""Labeled corpora: CSV ingestion with strict label validation, the
synthetic desk-scale corpus generator, and the keyword-polarity judge
used by the augmentation filter before a trained model exists."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .instruction import word_tokens
from .lexicons import NEGATION_CUES, NEGATIVE_WORDS, POSITIVE_WORDS


class ParseError(ValueError):
    pass


@dataclass
class LabeledCorpus:
    samples: list[tuple[str, int]]
    label_names: list[str]
    domain: str = ""

    def __post_init__(self):
        for text, label in self.samples:
            if not text:
                raise ParseError("empty text in corpus")
            if not 0 <= label < len(self.label_names):
                raise ParseError(f"label {label} outside {self.label_names}")

    def __len__(self) -> int:
        return len(self.samples)

    def texts(self) -> list[str]:
        return [t for t, _ in self.samples]


# label-name presets for the common dataset conventions
LABEL_PRESETS = {
    "binary": ["negative", "positive"],
    "stars5": ["1", "2", "3", "4", "5"],
}


def load_csv(path, text_column: str = "text", label_column: str = "label",
             label_names: list[str] | None = None, domain: str = "") -> LabeledCorpus:
    label_names = label_names or LABEL_PRESETS["binary"]
    index = {name: i for i, name in enumerate(label_names)}
    samples: list[tuple[str, int]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ParseError(f"{path}: missing header")
        for col in (text_column, label_column):
            if col not in reader.fieldnames:
                raise ParseError(f"{path}: missing column {col!r}")
        for lineno, row in enumerate(reader, start=2):
            raw = row.get(label_column)
            text = row.get(text_column)
            if raw is None or text is None:
                raise ParseError(f"{path}:{lineno}: malformed row")
            if raw not in index:
                raise ParseError(f"{path}:{lineno}: unknown label {raw!r}, "
                                 f"expected one of {label_names}")
            samples.append((text, index[raw]))
    return LabeledCorpus(samples=samples, label_names=label_names, domain=domain)


def save_csv(path, corpus: LabeledCorpus, text_column: str = "text",
             label_column: str = "label") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([text_column, label_column])
        for text, label in corpus.samples:
            writer.writerow([text, corpus.label_names[label]])


_SUBJECTS = ["food", "service", "movie", "acting", "story", "product",
             "atmosphere", "staff", "music", "experience"]
_FILLER = ["overall", "honestly", "to be fair", "in the end", "all in all",
           "frankly", "without a doubt"]
_CLASS_POOLS = {
    0: ["terrible", "awful", "boring", "disappointing", "bland", "dreadful",
        "mediocre", "annoying", "horrible", "sloppy"],
    1: ["excellent", "wonderful", "fantastic", "amazing", "delightful",
        "superb", "charming", "brilliant", "pleasant", "memorable"],
}


def make_synthetic_corpus(n_per_class: int, classes: int = 2,
                          seed: int = 0) -> LabeledCorpus:
    """Keyword-separable sentences; a fixed 10% per class are negated
    constructions ("not " + opposite-class keyword) that keep the label."""
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    if classes < 2 or classes > len(_CLASS_POOLS) + 3:
        raise ValueError(f"classes must be in [2, 5], got {classes}")
    pools = dict(_CLASS_POOLS)
    extra = [["average", "ordinary", "plain", "typical", "standard"],
             ["decent", "fine", "acceptable", "adequate", "passable"],
             ["glorious", "stunning", "magnificent", "flawless", "gorgeous"]]
    for i in range(2, classes):
        pools[i] = extra[i - 2]
    rng = np.random.default_rng(seed)
    samples: list[tuple[str, int]] = []
    for cls in range(classes):
        n_negated = n_per_class // 10
        for j in range(n_per_class):
            subject = _SUBJECTS[int(rng.integers(len(_SUBJECTS)))]
            filler = _FILLER[int(rng.integers(len(_FILLER)))]
            if j < n_negated:
                other = (cls + 1) % classes
                kw = pools[other][int(rng.integers(len(pools[other])))]
                text = f"the {subject} was not {kw} {filler}"
            else:
                kw = pools[cls][int(rng.integers(len(pools[cls])))]
                kw2 = pools[cls][int(rng.integers(len(pools[cls])))]
                text = f"the {subject} was {kw} and {kw2} {filler}"
            samples.append((text, cls))
    names = (LABEL_PRESETS["binary"] if classes == 2
             else [f"class{i}" for i in range(classes)])
    return LabeledCorpus(samples=samples, label_names=names, domain="product")


def keyword_judge(text: str) -> int:
    """Polarity heuristic with negation flipping; 1 = positive, 0 = negative.

    Used as the augmentation-filter judge before any model is trained.
    """
    tokens = word_tokens(text)
    score = 0
    for i, tok in enumerate(tokens):
        polarity = 0
        if tok in POSITIVE_WORDS:
            polarity = 1
        elif tok in NEGATIVE_WORDS:
            polarity = -1
        if polarity and any(t in NEGATION_CUES for t in tokens[max(0, i - 3) : i]):
            polarity = -polarity
        score += polarity
    return 1 if score >= 0 else 0
