#!/usr/bin/env python3
"""Run the full exact-identity suite with negative controls."""

import sys

from bergproj.cli import main

if __name__ == "__main__":
    sys.exit(
        main(
            [
                "identities",
                "--max-n",
                "5",
                "--negative-controls",
                "--out",
                "identity_suite.json",
            ]
        )
    )
