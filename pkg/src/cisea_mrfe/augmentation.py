"""Sentiment-preserving corpus augmentation.

Pipeline: pick sentiment-bearing tokens, mask them, ask a paraphrase
provider for replacements, optionally append a rationale clause, then
keep only candidates a judge classifies with the original label.

Providers are pluggable: the built-in synonym provider is pure and
deterministic; `OfflineParaphraseProvider` replays whole-sentence
paraphrases from the exchange CSV produced by the external exporter.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import numpy as np

from .lexicons import CONTENT_WORDS, STOPWORDS, SYNONYMS
from .instruction import word_tokens


class ProviderError(RuntimeError):
    def __init__(self, provider_name: str, message: str):
        super().__init__(f"provider {provider_name!r}: {message}")
        self.provider_name = provider_name


class InputError(ValueError):
    pass


class ParaphraseProvider(Protocol):
    name: str
    mode: str  # "fill": per-mask token replacements; "sentence": whole paraphrases

    def propose(self, masked_text: str, k: int, original: str | None = None) -> list[str]:
        ...


class SynonymProvider:
    """Deterministic mask-filler backed by the shipped synonym table."""

    name = "synonym-table"
    mode = "fill"

    def propose(self, masked_text: str, k: int, original: str | None = None) -> list[str]:
        if original is None:
            return []
        return SYNONYMS.get(original.lower(), [])[:k]


class OfflineParaphraseProvider:
    """Whole-sentence paraphrases replayed from the exchange CSV
    (columns: source_text, augmented_text, label, provider)."""

    mode = "sentence"

    def __init__(self, path):
        self.name = f"offline:{path}"
        self._by_source: dict[str, list[str]] = {}
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            required = {"source_text", "augmented_text", "label", "provider"}
            if reader.fieldnames is None or not required <= set(reader.fieldnames):
                raise ProviderError(self.name, f"missing columns, need {sorted(required)}")
            for row in reader:
                self._by_source.setdefault(row["source_text"], []).append(row["augmented_text"])

    def propose(self, masked_text: str, k: int, original: str | None = None) -> list[str]:
        return self._by_source.get(masked_text, [])[:k]


@dataclass(frozen=True)
class AugmentedSample:
    source_text: str
    augmented_text: str
    label: int
    provenance: str  # mask-fill | style | rationale
    provider: str


def select_mask_targets(x: str) -> list[int]:
    """Positions of adjective/noun lexicon tokens; falls back to the single
    longest non-stopword token when nothing matches."""
    tokens = word_tokens(x)
    hits = [i for i, tok in enumerate(tokens) if tok in CONTENT_WORDS]
    if hits:
        return hits
    candidates = [(len(tok), -i, i) for i, tok in enumerate(tokens)
                  if tok not in STOPWORDS and tok.isalpha()]
    if not candidates:
        candidates = [(len(tok), -i, i) for i, tok in enumerate(tokens)]
    if not candidates:
        return []
    return [max(candidates)[2]]


def generate_candidates(x: str, positions: Sequence[int],
                        provider: ParaphraseProvider, k: int) -> list[str]:
    """Candidate texts differing from x only at masked positions (fill
    mode) or whole-sentence paraphrases (sentence mode); deduplicated."""
    if k == 0 or not positions:
        return []
    tokens = word_tokens(x)
    for p in positions:
        if not 0 <= p < len(tokens):
            raise InputError(f"mask position {p} out of range for {len(tokens)} tokens")
    out: list[str] = []
    seen = {x}
    try:
        if provider.mode == "sentence":
            for cand in provider.propose(x, k):
                if cand not in seen:
                    seen.add(cand)
                    out.append(cand)
            return out
        for p in positions:
            masked = tokens[:p] + ["[MASK]"] + tokens[p + 1 :]
            fills = provider.propose(" ".join(masked), k, original=tokens[p])
            for fill in fills:
                cand_tokens = tokens[:p] + [fill] + tokens[p + 1 :]
                cand = " ".join(cand_tokens)
                if cand not in seen:
                    seen.add(cand)
                    out.append(cand)
    except ProviderError:
        raise
    except Exception as exc:
        raise ProviderError(provider.name, str(exc)) from exc
    return out


def add_rationale_variant(x: str, label: int, identifier: str) -> str:
    """Append a "because"-clause rationale naming the identifier token."""
    if identifier.lower() not in word_tokens(x):
        raise InputError(f"identifier {identifier!r} does not occur in the text")
    base = x.rstrip()
    trailing_dot = base.endswith(".")
    if trailing_dot:
        base = base[:-1]
    return f'{base} because "{identifier}" captures the overall tone.'


def filter_consistent(candidates: Sequence[AugmentedSample],
                      judge: Callable[[str], int]) -> tuple[list[AugmentedSample], float]:
    """Keep candidates whose judged class equals their label; returns the
    retained list and the retention rate."""
    kept = [c for c in candidates if judge(c.augmented_text) == c.label]
    rate = len(kept) / len(candidates) if candidates else 1.0
    return kept, rate


def augment_corpus(corpus: Sequence[tuple[str, int]],
                   provider: ParaphraseProvider,
                   k: int,
                   judge: Callable[[str], int] | None,
                   seed: int = 0) -> tuple[list[tuple[str, int]], dict]:
    """Expand a labeled corpus with filtered mask-fill and rationale
    variants. Pure function of (corpus, k, seed) for the built-in
    provider. Returns (corpus + augmentations, per-class stats)."""
    rng = np.random.default_rng(seed)  # reserved for subsampling providers
    del rng
    out = list(corpus)
    proposed: list[AugmentedSample] = []
    for text, label in corpus:
        positions = select_mask_targets(text)
        for cand in generate_candidates(text, positions, provider, k):
            proposed.append(AugmentedSample(text, cand, label, "mask-fill", provider.name))
        if positions:
            tokens = word_tokens(text)
            ident = tokens[positions[0]]
            try:
                rat = add_rationale_variant(text, label, ident)
            except InputError:
                rat = None
            if rat is not None:
                proposed.append(AugmentedSample(text, rat, label, "rationale", provider.name))
    if judge is not None:
        kept, rate = filter_consistent(proposed, judge)
    else:
        kept, rate = list(proposed), 1.0
    per_class: dict[int, int] = {}
    for sample in kept:
        out.append((sample.augmented_text, sample.label))
        per_class[sample.label] = per_class.get(sample.label, 0) + 1
    stats = {"proposed": len(proposed), "retained": len(kept),
             "retention_rate": rate, "per_class": per_class}
    return out, stats
