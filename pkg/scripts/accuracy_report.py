#!/usr/bin/env python3
"""Reproduce the accuracy comparison: posit es=2 vs binary32 vs binary64.

Runs every benchmark through the simulator (use --engine direct for the
fast host-side evaluation; results are bit-identical) and prints the
reports plus a one-line summary table.
"""

import argparse

from posit_rv32.bench import run_bench


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--engine", choices=["sim", "direct"], default="sim")
    ap.add_argument("--which", default="all",
                    choices=["sin", "cos", "exp", "fft", "all"])
    args = ap.parse_args()

    reports = run_bench(args.which, engine=args.engine)
    for r in reports:
        print(r.to_text())
        print()
    print(f"{'benchmark':<15} {'posit mean %':>13} {'float32 mean %':>15} "
          f"{'ratio':>7}  CI disjoint")
    for r in reports:
        print(f"{r.name:<15} {r.posit.mean:>13.3e} {r.float32.mean:>15.3e} "
              f"{r.ratio:>7.1f}  {'yes' if r.ci_disjoint else 'no'}")


if __name__ == "__main__":
    main()
