#!/usr/bin/env python3
"""Run the full algebraic-law suites at acceptance scale and print a summary.

Usage: python scripts/run_laws.py [--seed N] [--json]
"""

import argparse
import json
import sys
import time

from mcsp.laws import SuiteConfig, run_suite


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=SuiteConfig.base_seed)
    parser.add_argument("--json", action="store_true")
    args = parser.parse_args()

    started = time.perf_counter()
    reports = run_suite(SuiteConfig(base_seed=args.seed))
    elapsed = time.perf_counter() - started

    if args.json:
        print(json.dumps([r.to_json() for r in reports], indent=2))
    else:
        for r in reports:
            print(r.describe())
        print(f"total: {elapsed:.1f}s, seed {args.seed}")
    gating = [r for r in reports if r.law_name != "ext-choice-commutativity-sf"]
    return 0 if all(r.passed for r in gating) else 1


if __name__ == "__main__":
    sys.exit(main())
