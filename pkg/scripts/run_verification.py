#!/usr/bin/env python3
"""Run the full verification battery and write verification_report.json."""

import sys

from cauchyratios.cli import main

if __name__ == "__main__":
    sys.exit(main(["verify-all", "--out", "verification_report.json"]
                  + sys.argv[1:]))
