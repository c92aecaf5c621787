#!/usr/bin/env python3
"""Difference-stability run at the acceptance settings; writes lip.csv/json."""

import sys

from kgnf.cli import main

if __name__ == "__main__":
    sys.exit(main([
        "lipschitz",
        "--model", "g11u",
        "--eps", "0.05", "--delta", "1e-5",
        "--n", "128", "--dt", "5e-3", "--s", "3",
        "--profile", "mode2", "--k1", "1", "--k2", "2",
        "--out", "lip",
        *sys.argv[1:],
    ]))
