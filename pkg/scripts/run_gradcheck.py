#!/usr/bin/env python3
"""Finite-difference gradient check of the full micro model; exits nonzero
if the max relative error reaches 1e-3."""

import sys

from cisea_mrfe.cli import run

if __name__ == "__main__":
    sys.exit(run(["gradcheck", *sys.argv[1:]]))
