#!/usr/bin/env python3
"""Sweep the arithmetic core against the exact oracle.

Default: exhaustive at ps=8 for es in {2, 3}, then a fuzz slice at ps=32.
Exits nonzero on any mismatch.
"""

import argparse
import sys
import time

from posit_rv32.conformance import run_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fuzz-count", type=int, default=100_000,
                    help="random tuples per op at ps=32")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    failed = False
    for mode, ps, count in (("exhaustive", 8, 0), ("fuzz", 32, args.fuzz_count)):
        for es in (2, 3):
            t0 = time.time()
            res = run_check(mode, ps, es, seed=args.seed, count=count,
                            workers=args.workers)
            dt = time.time() - t0
            n = sum(res.checked.values())
            print(f"{mode} ps={ps} es={es}: {n} cases in {dt:.1f}s -> "
                  f"{'pass' if res.ok else 'FAIL'}")
            for m in res.mismatches[:10]:
                print(f"  {m}")
            failed = failed or not res.ok
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
