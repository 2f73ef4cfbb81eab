#!/usr/bin/env python3
"""Kernel-set, max-length, and fusion-mode sweeps on the synthetic corpus.

Pass --axis to run just one; default runs all three in sequence.
"""

import sys

from cisea_mrfe.cli import run

if __name__ == "__main__":
    argv = sys.argv[1:]
    defaults = ["--n-per-class", "100", "--epochs", "3", "--batch-size", "16",
                "--out", "out/sweeps"]
    if "--axis" in argv:
        sys.exit(run(["sweep", *defaults, *argv]))
    code = 0
    for axis in ("kernels", "max_len", "fusion"):
        code = run(["sweep", "--axis", axis, *defaults, *argv]) or code
    sys.exit(code)
