#!/usr/bin/env python3
"""Reproduce the critical-exponent blow-up runs in both dimensions.

Writes one JSON report and one CSV of plot data per run; the n = 3 run
takes a minute or two.
"""

import sys

from bergproj.cli import main

RUNS = (
    ["blowup", "--n", "2", "--p", "4",
     "--out", "blowup_n2_p4.json", "--csv", "blowup_n2_p4.csv"],
    ["blowup", "--n", "3", "--p", "3", "--s", "0.9,0.99,0.999",
     "--out", "blowup_n3_p3.json", "--csv", "blowup_n3_p3.csv"],
)

if __name__ == "__main__":
    code = 0
    for argv in RUNS:
        print(f"--- bergproj {' '.join(argv)}")
        code = max(code, main(argv))
    sys.exit(code)
