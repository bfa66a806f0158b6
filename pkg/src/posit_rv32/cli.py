"""Command-line surface: convert, check, run, bench, disasm, oracle-batch.

All reports are UTF-8 "key: value" text with stable key order. Exit codes:
0 success; 1 conformance mismatch or benchmark property failure; 2 usage
error; for `run`, the guest's exit code on a clean exit, 253 on fuel
exhaustion, 254 on a trap.
"""

from __future__ import annotations

import argparse
import sys
from decimal import Decimal, getcontext
from fractions import Fraction

from . import conformance, oracle
from .bench import run_bench
from .core import PositConfig
from .isa import disasm
from .sim import SimConfig, Simulator, load_image


def _fmt_value(v) -> str:
    """Shortest-digits scientific form with a capital E exponent."""
    if v is oracle.NAR:
        return "NaR"
    try:
        f = float(v)
    except OverflowError:
        f = float("inf")
    if abs(f) in (float("inf"), 0.0) and v != 0:  # beyond binary64 range
        getcontext().prec = 20
        return str(Decimal(v.numerator) / Decimal(v.denominator))
    return repr(f).replace("e", "E")


def _cfg(args) -> PositConfig:
    return PositConfig.fixed(args.ps, args.es)


def cmd_convert(args) -> int:
    text = args.value
    cfg = _cfg(args)
    lines = []
    try:
        if text.lower().startswith("0x"):
            word = int(text, 16)
            if word >> cfg.ps:
                raise ValueError(f"{text} does not fit in {cfg.ps} bits")
            v = oracle.exact_value(word, cfg.ps, cfg.es)
            lines.append(f"word: 0x{word:0{cfg.ps // 4}X}")
            lines.append(f"value: {_fmt_value(v)}")
            if v is not oracle.NAR:
                lines.append(f"exact: {v.numerator}/{v.denominator}")
        else:
            x = Fraction(text)
            word = oracle.round_to_posit(x, cfg.ps, cfg.es)
            v = oracle.exact_value(word, cfg.ps, cfg.es)
            lines.append(f"word: 0x{word:0{cfg.ps // 4}X}")
            lines.append(f"value: {_fmt_value(v)}")
            lines.append(f"exact: {v.numerator}/{v.denominator}")
            lines.append(f"input_exact: {'yes' if v == x else 'no'}")
    except (ValueError, ZeroDivisionError) as e:
        print(f"error: cannot parse {text!r}: {e}", file=sys.stderr)
        return 2
    _emit(args, "\n".join(lines))
    return 0


def cmd_check(args) -> int:
    ops = args.ops.split(",") if args.ops and args.ops != "all" else None
    result = conformance.run_check(
        args.check_mode, args.ps, args.es, ops=ops, seed=args.seed,
        count=args.count, workers=args.workers)
    _emit(args, result.report())
    return 0 if result.ok else 1


def cmd_run(args) -> int:
    with open(args.image, "rb") as f:
        data = f.read()
    cfg = SimConfig(mode=args.mode, mem_size=args.mem_size)
    sim = Simulator(cfg)
    if args.trace:
        sim.trace_sink = lambda line: print(line, file=sys.stderr)
    load_image(sim, data, base=args.base,
               entry=args.entry if args.entry is not None else None)
    report = sim.run(fuel=args.fuel)
    _emit(args, report.to_text())
    if report.status == "ok":
        return report.exit_code & 0xFF
    return 253 if report.status == "fuel-exhausted" else 254


def cmd_bench(args) -> int:
    reports = run_bench(args.which, engine=args.engine)
    text = "\n\n".join(r.to_text() for r in reports)
    _emit(args, text)
    ok = all(r.posit.mean < r.float32.mean for r in reports)
    return 0 if ok else 1


def cmd_disasm(args) -> int:
    lines = []
    if args.image.lower().startswith("0x"):
        lines.append(disasm(int(args.image, 16)))
    else:
        with open(args.image, "rb") as f:
            data = f.read()
        for off in range(0, len(data) - 3, 4):
            word = int.from_bytes(data[off:off + 4], "little")
            lines.append(f"{args.base + off:#010x}: {disasm(word)}")
    _emit(args, "\n".join(lines))
    return 0


def cmd_oracle_batch(args) -> int:
    for line in sys.stdin:
        if line.strip():
            print(oracle.batch_eval_line(line))
    return 0


def _emit(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    else:
        print(text)


def _auto_int(s: str) -> int:
    return int(s, 0)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="posit-rv32",
        description="Posit arithmetic core, RV32 simulator, and benchmarks")
    p.add_argument("--ps", type=int, default=32, help="posit size in bits")
    p.add_argument("--es", type=int, default=2, help="exponent field size")
    p.add_argument("--mode", choices=["tight", "coproc"], default="tight",
                   help="FPU integration mode for `run`")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1_000_000,
                   help="fuzz cases per operation")
    p.add_argument("--trace", action="store_true",
                   help="print one line per retired instruction to stderr")
    p.add_argument("--out", help="write the report to a file instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("convert", help="decimal <-> posit word")
    c.add_argument("value", help="decimal (1.5, 3e40) or 0x-prefixed word")
    c.set_defaults(fn=cmd_convert)

    c = sub.add_parser("check", help="conformance against the exact oracle")
    c.add_argument("check_mode", choices=["exhaustive", "fuzz"])
    c.add_argument("--ops", default="all",
                   help=f"comma list from: {', '.join(conformance.ALL_OPS)}")
    c.add_argument("--workers", type=int, default=None)
    c.set_defaults(fn=cmd_check)

    c = sub.add_parser("run", help="execute a guest image")
    c.add_argument("image", help="flat binary or ELF32 file")
    c.add_argument("--base", type=_auto_int, default=0x1000)
    c.add_argument("--entry", type=_auto_int, default=None)
    c.add_argument("--fuel", type=int, default=10_000_000)
    c.add_argument("--mem-size", type=_auto_int, default=64 * 1024 * 1024)
    c.set_defaults(fn=cmd_run)

    c = sub.add_parser("bench", help="accuracy benchmarks vs binary32")
    c.add_argument("which", choices=["sin", "cos", "exp", "fft", "all"])
    c.add_argument("--engine", choices=["sim", "direct"], default="sim")
    c.set_defaults(fn=cmd_bench)

    c = sub.add_parser("disasm", help="disassemble an image or a 0x word")
    c.add_argument("image")
    c.add_argument("--base", type=_auto_int, default=0x1000)
    c.set_defaults(fn=cmd_disasm)

    c = sub.add_parser("oracle-batch",
                       help="read 'op hexA hexB hexC es' lines, print results")
    c.set_defaults(fn=cmd_oracle_batch)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
