#!/usr/bin/env python3
"""Symbol-identity battery for one model; writes check.json."""

import sys

from kgnf.cli import main

if __name__ == "__main__":
    sys.exit(main([
        "nf-check",
        "--model", "generic",
        "--samples", "1000",
        "--out", "check",
        *sys.argv[1:],
    ]))
