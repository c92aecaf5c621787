#!/usr/bin/env python3
"""Lifespan probe at the acceptance settings; writes life.csv/json."""

import sys

from kgnf.cli import main

if __name__ == "__main__":
    sys.exit(main([
        "lifespan",
        "--model", "g11u",
        "--eps", "0.1,0.05,0.025",
        "--n", "128", "--dt", "0.02", "--s", "3",
        "--theta", "2.0", "--cap-factor", "50",
        "--profile", "mode2", "--k1", "1", "--k2", "2",
        "--out", "life",
        *sys.argv[1:],
    ]))
