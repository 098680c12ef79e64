#!/usr/bin/env python3
"""Weight-constant tables: the one-point family across its exponent
range and a two-point family inside its boundedness interval."""

import sys

from bergproj.cli import main

RUNS = (
    ["bekolle-bonami", "--weight", "up", "--p-list", "1.5,2,3,3.5,3.8,3.9,3.95",
     "--points", "0.5", "--out", "weights_up.json"],
    ["bekolle-bonami", "--weight", "vp", "--p-list", "1.6,2,2.5,2.9",
     "--points", "0.3,0.3+0.02j", "--out", "weights_vp.json"],
)

if __name__ == "__main__":
    code = 0
    for argv in RUNS:
        print(f"--- bergproj {' '.join(argv)}")
        code = max(code, main(argv))
    sys.exit(code)
