#!/usr/bin/env python3
"""Run the 7-row component ablation on the synthetic corpus and write the
accuracy / macro-F1 table under --out."""

import sys

from cisea_mrfe.cli import run

if __name__ == "__main__":
    argv = sys.argv[1:]
    defaults = ["--n-per-class", "100", "--epochs", "3", "--batch-size", "16",
                "--out", "out/ablation"]
    sys.exit(run(["ablate", *defaults, *argv]))
