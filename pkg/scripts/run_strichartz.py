#!/usr/bin/env python3
"""Line-proxy dispersive diagnostics; writes stri.csv/json."""

import sys

from kgnf.cli import main

if __name__ == "__main__":
    sys.exit(main([
        "strichartz",
        "--model", "g11u",
        "--eps", "0.04,0.02,0.01",
        "--n", "512", "--L", "64pi", "--dt", "0.05", "--s", "3",
        "--out", "stri",
        *sys.argv[1:],
    ]))
