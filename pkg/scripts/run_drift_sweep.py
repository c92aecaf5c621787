#!/usr/bin/env python3
"""Energy-drift sweep at the acceptance settings; writes sweep.csv/json."""

import sys

from kgnf.cli import main

if __name__ == "__main__":
    sys.exit(main([
        "drift-sweep",
        "--models", "g11u,generic",
        "--eps", "0.02,0.01,0.005",
        "--n", "256", "--dt", "1e-3", "--T", "1.0", "--s", "3",
        "--profile", "mode2", "--k1", "1", "--k2", "2",
        "--out", "sweep",
        *sys.argv[1:],
    ]))
