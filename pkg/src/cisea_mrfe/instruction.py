"""Instruction-augmented input construction and tokenization.

A review is wrapped with a domain directive ("This is a restaurant
review."), a "Review:" prefix, and an optional "Comment:" rationale that
names the sentiment-bearing token. The result is tokenized into id
sequences by a deterministic lowercase word tokenizer with
WordPiece-style special tokens.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field


class InputError(ValueError):
    pass


class RegistryError(KeyError):
    pass


DOMAIN_DIRECTIVES = {
    "movie": "This is a movie review.",
    "restaurant": "This is a restaurant review.",
    "tweet": "This is a tweet.",
    "product": "This is a product review.",
}


@dataclass(frozen=True)
class InstructionTemplate:
    pattern_id: str
    domain: str = ""
    prefix: str = "Review: "
    response_slot: str | None = None
    identifier_slot: str | None = None
    connector: str = "because"


DEFAULT_TEMPLATE = InstructionTemplate(pattern_id="default")


def apply_instruction(x: str, c: str | None = None,
                      tmpl: InstructionTemplate = DEFAULT_TEMPLATE,
                      r: str | None = None, i: str | None = None) -> str:
    """Render the instruction-augmented text X' for review x.

    Renders, in order: directive (from explicit context c or the
    template's domain), the prefixed review, and a rationale comment when
    a response r (and optionally identifier i) is supplied. The review
    text itself is never altered.
    """
    if not x.strip():
        raise InputError("review text is empty")
    r = r if r is not None else tmpl.response_slot
    i = i if i is not None else tmpl.identifier_slot
    parts: list[str] = []
    directive = c if c is not None else DOMAIN_DIRECTIVES.get(tmpl.domain, "")
    if directive:
        parts.append(directive)
    if r is not None:
        parts.append(f'{tmpl.prefix}"{x}"')
        comment = f"Comment: {r}"
        if i is not None:
            comment += f' {tmpl.connector} "{i}" expresses strong sentiment.'
        parts.append(comment)
    else:
        parts.append(f"{tmpl.prefix}{x}")
    return " ".join(parts)


class TemplateRegistry:
    def __init__(self):
        self._by_id: dict[str, InstructionTemplate] = {}
        self._by_domain: dict[str, list[InstructionTemplate]] = {}

    def register(self, tmpl: InstructionTemplate) -> InstructionTemplate:
        if tmpl.pattern_id in self._by_id:
            raise RegistryError(f"duplicate pattern_id {tmpl.pattern_id!r}")
        self._by_id[tmpl.pattern_id] = tmpl
        self._by_domain.setdefault(tmpl.domain, []).append(tmpl)
        return tmpl

    def by_id(self, pattern_id: str) -> InstructionTemplate:
        if pattern_id not in self._by_id:
            raise RegistryError(f"unknown pattern_id {pattern_id!r}")
        return self._by_id[pattern_id]

    def by_domain(self, domain: str) -> list[InstructionTemplate]:
        return list(self._by_domain.get(domain, []))

    def __len__(self) -> int:
        return len(self._by_id)


def load_templates(path) -> list[InstructionTemplate]:
    """Parse the flat key=value template file: one template per blank-line
    separated record; '#' starts a comment line."""
    templates = []
    record: dict[str, str] = {}

    def flush():
        if record:
            templates.append(InstructionTemplate(
                pattern_id=record["pattern_id"],
                domain=record.get("domain", ""),
                prefix=record.get("prefix", "Review: "),
                connector=record.get("connector", "because"),
            ))
            record.clear()

    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                continue
            if not line.strip():
                flush()
                continue
            key, _, value = line.partition("=")
            record[key.strip()] = value.strip()
    flush()
    return templates


PAD, UNK, MASK, CLS, SEP = 0, 1, 2, 3, 4
SPECIALS = ["[PAD]", "[UNK]", "[MASK]", "[CLS]", "[SEP]"]

_TOKEN_RE = re.compile(r"\[mask\]|\w+|[^\w\s]")


def word_tokens(text: str) -> list[str]:
    """Lowercase split on whitespace; punctuation becomes its own token."""
    return _TOKEN_RE.findall(text.lower())


@dataclass
class Vocab:
    token_to_id: dict[str, int] = field(default_factory=dict)
    max_size: int = 0

    def __post_init__(self):
        for sid, tok in enumerate(SPECIALS):
            self.token_to_id.setdefault(tok.lower(), sid)

    @property
    def size(self) -> int:
        return len(self.token_to_id)

    def id_of(self, token: str) -> int:
        return self.token_to_id.get(token, UNK)

    def tokens(self) -> list[str]:
        inv = sorted(self.token_to_id.items(), key=lambda kv: kv[1])
        return [tok for tok, _ in inv]

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for tok in self.tokens():
                fh.write(tok + "\n")

    @classmethod
    def load(cls, path) -> "Vocab":
        with open(path, encoding="utf-8") as fh:
            toks = [line.rstrip("\n") for line in fh if line.rstrip("\n")]
        return cls(token_to_id={tok: idx for idx, tok in enumerate(toks)},
                   max_size=len(toks))


def build_vocab(corpus, max_size: int = 20000) -> Vocab:
    """Frequency-ranked vocabulary (ties broken lexicographically); the
    five special tokens occupy ids 0-4."""
    counts: Counter[str] = Counter()
    n_texts = 0
    for text in corpus:
        n_texts += 1
        counts.update(word_tokens(text))
    if n_texts == 0:
        raise InputError("empty corpus")
    for special in SPECIALS:
        counts.pop(special.lower(), None)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    vocab = Vocab(max_size=max_size)
    for token, _ in ranked[: max(max_size - len(SPECIALS), 0)]:
        vocab.token_to_id.setdefault(token, len(vocab.token_to_id))
    return vocab


def tokenize(x_prime: str, vocab: Vocab, max_len: int) -> list[int]:
    """Tokenize to ids with [CLS] ... [SEP], truncated to max_len."""
    if max_len < 3:
        raise InputError(f"max_len must be >= 3, got {max_len}")
    body = word_tokens(x_prime)[: max_len - 2]
    return [CLS] + [vocab.id_of(tok) for tok in body] + [SEP]


def tokenize_words(x_prime: str, max_len: int) -> list[str]:
    """Token strings aligned 1:1 with tokenize()'s ids (incl. specials)."""
    if max_len < 3:
        raise InputError(f"max_len must be >= 3, got {max_len}")
    body = word_tokens(x_prime)[: max_len - 2]
    return ["[cls]"] + body + ["[sep]"]


def detokenize(ids, vocab: Vocab) -> str:
    toks = vocab.tokens()
    words = [toks[i] for i in ids if i not in (PAD, CLS, SEP)]
    return " ".join(words)
