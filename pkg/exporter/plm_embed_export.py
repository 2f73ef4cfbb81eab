#!/usr/bin/env python3
"""Export contextual token embeddings or paraphrase candidates from a
pretrained encoder into the classifier's interchange formats.

Standalone by design: the binary CEMB layout and the paraphrase-exchange
CSV columns are the only contract with the classifier package, so this
script shares no code with it.

Modes:
  embeddings   one CEMB record per CSV row: token-level vectors [n, 768]
               plus the label, little-endian float32.
  paraphrases  CSV with columns source_text, augmented_text, label,
               provider; at most --top-k rows per source.

Encoders:
  hash768      deterministic offline stand-in: each token maps to a fixed
               unit-norm 768-dim vector derived from a BLAKE2 digest of
               the token. No model download, fully reproducible.
  <hf-name>    any Hugging Face encoder name; requires the `transformers`
               package and local model availability. Load failures exit
               nonzero with a diagnostic.
"""

import argparse
import csv
import hashlib
import re
import struct
import sys

import numpy as np

MAGIC = b"CEMB"
VERSION = 1
HASH_DIM = 768
_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def word_tokens(text):
    return _TOKEN_RE.findall(text.lower())


class EncoderError(RuntimeError):
    pass


class Hash768Encoder:
    """Deterministic token -> unit vector map; d = 768 like BERT-base."""

    name = "hash768"
    dim = HASH_DIM

    def encode(self, text, max_len):
        tokens = word_tokens(text)[:max_len]
        if not tokens:
            tokens = ["[empty]"]
        rows = np.empty((len(tokens), self.dim), dtype=np.float32)
        for i, tok in enumerate(tokens):
            digest = hashlib.blake2b(tok.encode("utf-8"), digest_size=8).digest()
            rng = np.random.default_rng(int.from_bytes(digest, "little"))
            v = rng.standard_normal(self.dim).astype(np.float32)
            rows[i] = v / np.linalg.norm(v)
        return rows


class TransformersEncoder:
    """Final-layer hidden states of a Hugging Face encoder."""

    def __init__(self, name):
        self.name = name
        try:
            from transformers import AutoModel, AutoTokenizer  # noqa: PLC0415
        except ImportError as exc:
            raise EncoderError(
                f"encoder {name!r} needs the 'transformers' package: {exc}") from exc
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(name)
            self.model = AutoModel.from_pretrained(name)
        except Exception as exc:  # load/network failures surface as exit != 0
            raise EncoderError(f"failed to load encoder {name!r}: {exc}") from exc
        self.model.eval()

    def encode(self, text, max_len):
        import torch  # noqa: PLC0415

        enc = self.tokenizer(text, truncation=True, max_length=max_len,
                             return_tensors="pt")
        with torch.no_grad():
            hidden = self.model(**enc).last_hidden_state[0]
        return hidden.numpy().astype(np.float32)


def make_encoder(name):
    if name == "hash768":
        return Hash768Encoder()
    return TransformersEncoder(name)


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "text" not in reader.fieldnames \
                or "label" not in reader.fieldnames:
            raise SystemExit(f"error: {path}: expected 'text' and 'label' columns")
        return [(row["text"], row["label"]) for row in reader]


def label_index(raw, seen):
    """Map label strings to stable integer indices in first-seen order;
    numeric labels pass through."""
    try:
        return int(raw)
    except ValueError:
        if raw not in seen:
            seen[raw] = len(seen)
        return seen[raw]


def export_embeddings(args, encoder):
    rows = read_rows(args.input)
    seen = {}
    with open(args.output, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(rows)))
        for text, raw_label in rows:
            emb = encoder.encode(text, args.max_len)
            n, d = emb.shape
            fh.write(struct.pack("<II", n, d))
            fh.write(np.ascontiguousarray(emb, dtype="<f4").tobytes())
            fh.write(struct.pack("<i", label_index(raw_label, seen)))
    print(f"wrote {len(rows)} records (d={encoder.dim if hasattr(encoder, 'dim') else 'model'}) "
          f"to {args.output}")


# small table for the offline paraphrase path; a real run would query a
# seq2seq model per masked position
_SWAPS = {
    "good": ["great", "fine", "solid"],
    "great": ["excellent", "good", "superb"],
    "bad": ["poor", "awful", "weak"],
    "fantastic": ["wonderful", "excellent", "superb"],
    "terrible": ["awful", "dreadful", "horrible"],
    "boring": ["dull", "tedious", "flat"],
    "amazing": ["astonishing", "incredible", "remarkable"],
    "love": ["adore", "enjoy", "like"],
    "hate": ["dislike", "despise", "loathe"],
}


def propose_paraphrases(text, k):
    tokens = word_tokens(text)
    out = []
    for i, tok in enumerate(tokens):
        for alt in _SWAPS.get(tok, []):
            candidate = tokens[:i] + [alt] + tokens[i + 1 :]
            out.append(" ".join(candidate))
            if len(out) >= k:
                return out
    return out


def export_paraphrases(args, encoder):
    rows = read_rows(args.input)
    with open(args.output, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source_text", "augmented_text", "label", "provider"])
        for text, raw_label in rows:
            for candidate in propose_paraphrases(text, args.top_k):
                writer.writerow([text, candidate, raw_label, encoder.name])
    print(f"wrote paraphrases for {len(rows)} sources to {args.output}")


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="Export contextual embeddings (CEMB) or paraphrase CSVs.")
    parser.add_argument("--input", required=True, help="input CSV with text,label")
    parser.add_argument("--output", required=True)
    parser.add_argument("--mode", choices=["embeddings", "paraphrases"],
                        default="embeddings")
    parser.add_argument("--encoder", default="hash768")
    parser.add_argument("--max-len", type=int, default=512)
    parser.add_argument("--top-k", type=int, default=3)
    args = parser.parse_args(argv)
    if args.max_len > 512:
        parser.error("--max-len above 512 exceeds what the classifier accepts")
    try:
        encoder = make_encoder(args.encoder)
        if args.mode == "embeddings":
            export_embeddings(args, encoder)
        else:
            export_paraphrases(args, encoder)
    except EncoderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
