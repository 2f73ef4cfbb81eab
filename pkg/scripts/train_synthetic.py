#!/usr/bin/env python3
"""Train the full model on the built-in synthetic corpus and report test
accuracy. Artifacts (checkpoint, history, report) land under --out."""

import sys

from cisea_mrfe.cli import run

if __name__ == "__main__":
    argv = sys.argv[1:]
    defaults = ["--n-per-class", "1000", "--epochs", "20", "--batch-size", "64",
                "--learning-rate", "1e-3", "--out", "out/synthetic"]
    sys.exit(run(["train", *defaults, *argv]))
