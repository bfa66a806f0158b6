"""Conformance checking of the FPU datapaths against the exact oracle.

Two modes: ``exhaustive`` enumerates the full input space (ps <= 16) and
``fuzz`` drives seeded random words. Every run prepends the special-value
corpus (zero, NaR, +-maxpos, +-minpos, +-1) so the exceptional paths are hit
regardless of the seed. Work can be sharded across processes; shards are
seeded independently so aggregation is order-free.
"""

from __future__ import annotations

import multiprocessing
import os
import random
import zlib
from dataclasses import dataclass, field

from . import arith, oracle
from .core import FLAG_DZ, PositConfig

MISMATCH_LIMIT = 20  # per shard; enough to diagnose, cheap to carry

FMA_CONTROLS = {
    "fmadd": (False, False),
    "fmsub": (False, True),
    "fnmsub": (True, False),
    "fnmadd": (True, True),
}

OP_ARITY = {
    "fadd": 2, "fsub": 2, "fmul": 2, "fdiv": 2,
    "fmadd": 3, "fmsub": 3, "fnmsub": 3, "fnmadd": 3,
    "fsqrt": 1, "fcvt.w": 1, "fcvt.wu": 1, "fcvt.int": 1,
    "fcmp": 2, "fsgnj": 2, "fclass": 1, "fcvt.es": 1,
}

ALL_OPS = tuple(OP_ARITY)


def _shard_seed(seed: int, op: str, es: int, shard: int) -> int:
    return zlib.crc32(f"{seed}:{op}:{es}:{shard}".encode())


def special_words(ps: int) -> tuple[int, ...]:
    nar = 1 << (ps - 1)
    one = 1 << (ps - 2)
    return (0, nar, nar - 1, 1, nar + 1, (1 << ps) - 1, one, nar | one)


def ops_for(ps: int, names=None) -> tuple[str, ...]:
    ops = ALL_OPS if not names or names == "all" else tuple(names)
    if ps != 32:
        ops = tuple(o for o in ops if o != "fcvt.es")
    for op in ops:
        if op not in OP_ARITY:
            raise ValueError(f"unknown op {op!r}")
    return ops


def _fmt(ps, words):
    return " ".join(f"0x{w:0{ps // 4}X}" for w in words)


class _Checker:
    """Runs one operation against the oracle over a stream of tuples."""

    def __init__(self, op: str, ps: int, es: int):
        self.op = op
        self.ps = ps
        self.es = es
        self.count = 0
        self.mismatches: list[str] = []
        self.arity = OP_ARITY[op]
        self._fn = self._build(op, ps, es)

    def _record(self, words, got, want):
        if len(self.mismatches) < MISMATCH_LIMIT:
            self.mismatches.append(
                f"{self.op} ps={self.ps} es={self.es} "
                f"in=[{_fmt(self.ps, words)}] got={got:#x} want={want:#x}"
            )

    def feed(self, tup):
        self.count += 1
        bad = self._fn(tup, self.count)
        if bad is not None:
            self._record(tup, bad[0], bad[1])

    def _build(self, op, ps, es):
        """Specialize a (tuple, count) -> None | (got, want) closure."""
        cfg = PositConfig.fixed(ps, es)
        val = oracle.exact_value
        rnd = oracle.round_to_posit
        nar_word = 1 << (ps - 1)

        if op in ("fadd", "fsub", "fmul"):
            core = {"fadd": arith.add, "fsub": arith.sub, "fmul": arith.mul}[op]
            orc = {"fadd": oracle.oracle_add, "fsub": oracle.oracle_sub,
                   "fmul": oracle.oracle_mul}[op]

            def check(tup, _n):
                a, b = tup
                got = core(a, b, cfg)
                want = rnd(orc(val(a, ps, es), val(b, ps, es)), ps, es)
                return None if got == want else (got, want)
        elif op in FMA_CONTROLS:
            ng, sb = FMA_CONTROLS[op]
            ctl = arith.FmaControl(ng, sb)

            def check(tup, _n):
                a, b, c = tup
                got = arith.fma(a, b, c, ctl, cfg)
                want = rnd(oracle.oracle_fma(
                    val(a, ps, es), val(b, ps, es), val(c, ps, es), ng, sb), ps, es)
                return None if got == want else (got, want)
        elif op == "fdiv":
            def check(tup, _n):
                a, b = tup
                got, flags = arith.div(a, b, cfg)
                vb = val(b, ps, es)
                want = rnd(oracle.oracle_div(val(a, ps, es), vb), ps, es)
                want_flags = FLAG_DZ if vb is oracle.ZERO else 0
                if flags != want_flags:
                    return (flags, want_flags)
                return None if got == want else (got, want)
        elif op == "fsqrt":
            def check(tup, _n):
                a = tup[0]
                got = arith.sqrt(a, cfg)
                want = oracle.oracle_sqrt(val(a, ps, es)).round(ps, es)
                return None if got == want else (got, want)
        elif op in ("fcvt.w", "fcvt.wu"):
            unsigned = op.endswith("u")

            def check(tup, n):
                a = tup[0]
                rtz = (n & 1) == 0
                got = arith.posit_to_int(a, cfg, unsigned, rtz)
                want = oracle.oracle_to_int(val(a, ps, es), ps, unsigned, rtz)
                return None if got == want else (got, want)
        elif op == "fcvt.int":
            def check(tup, n):
                a = tup[0]
                unsigned = (n & 1) == 0
                got = arith.int_to_posit(a, cfg, unsigned)
                want = oracle.oracle_from_int(a, ps, es, unsigned)
                return None if got == want else (got, want)
        elif op == "fcmp":
            key = oracle.order_key

            def check(tup, _n):
                a, b = tup
                ka = key(val(a, ps, es))
                kb = key(val(b, ps, es))
                le = ka <= kb
                if arith.compare_eq(a, b) != (ka == kb):
                    return (a == b, ka == kb)
                if arith.compare_lt(a, b, ps) != (ka < kb):
                    return (int(arith.compare_lt(a, b, ps)), int(ka < kb))
                if arith.compare_le(a, b, ps) != le:
                    return (int(arith.compare_le(a, b, ps)), int(le))
                if arith.minnum(a, b, ps) != (a if le else b):
                    return (arith.minnum(a, b, ps), a if le else b)
                if arith.maxnum(a, b, ps) != (b if le else a):
                    return (arith.maxnum(a, b, ps), b if le else a)
                return None
        elif op == "fsgnj":
            def check(tup, _n):
                a, b = tup
                sa = a >> (ps - 1)
                sb_ = b >> (ps - 1)
                va = val(a, ps, es)
                for kind, target in (("SGNJ", sb_), ("SGNJN", sb_ ^ 1),
                                     ("SGNJX", sa ^ sb_)):
                    got = arith.sign_inject(a, b, kind, ps)
                    if va is oracle.NAR:
                        want = nar_word
                    elif va == 0:
                        want = 0
                    else:
                        want = rnd(-abs(va) if target else abs(va), ps, es)
                    if got != want:
                        return (got, want)
                return None
        elif op == "fclass":
            def check(tup, _n):
                a = tup[0]
                got = arith.classify(a, ps)
                va = val(a, ps, es)
                if va is oracle.NAR:
                    want = arith.CLASS_NAR
                elif va == 0:
                    want = arith.CLASS_ZERO
                elif va < 0:
                    want = arith.CLASS_NEGATIVE
                else:
                    want = arith.CLASS_POSITIVE
                return None if got == want else (got, want)
        elif op == "fcvt.es":
            def check(tup, n):
                a = tup[0]
                src, dst = (2, 3) if n & 1 else (3, 2)
                got = arith.convert_es(a, src, dst, ps)
                want = rnd(val(a, ps, src), ps, dst)
                return None if got == want else (got, want)
        else:
            raise ValueError(f"unknown op {op!r}")
        return check


@dataclass
class CheckResult:
    mode: str
    ps: int
    es: int
    checked: dict = field(default_factory=dict)
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def merge(self, other: "CheckResult"):
        for k, v in other.checked.items():
            self.checked[k] = self.checked.get(k, 0) + v
        self.mismatches.extend(other.mismatches)

    def report(self) -> str:
        lines = [f"mode: {self.mode}", f"ps: {self.ps}", f"es: {self.es}"]
        for op in sorted(self.checked):
            lines.append(f"checked.{op}: {self.checked[op]}")
        lines.append(f"mismatches: {len(self.mismatches)}")
        for m in self.mismatches[:MISMATCH_LIMIT]:
            lines.append(f"mismatch: {m}")
        lines.append(f"status: {'pass' if self.ok else 'FAIL'}")
        return "\n".join(lines)


def _tuples_special(ps: int, arity: int):
    words = special_words(ps)
    if arity == 1:
        return [(w,) for w in words]
    if arity == 2:
        return [(a, b) for a in words for b in words]
    return [(a, b, c) for a in words for b in words for c in words]


def _run_fuzz_shard(task) -> CheckResult:
    op, ps, es, seed, count, with_specials = task
    chk = _Checker(op, ps, es)
    if with_specials:
        for tup in _tuples_special(ps, chk.arity):
            chk.feed(tup)
    rng = random.Random(seed)
    grb = rng.getrandbits
    feed = chk.feed
    if chk.arity == 1:
        for _ in range(count):
            feed((grb(ps),))
    elif chk.arity == 2:
        for _ in range(count):
            feed((grb(ps), grb(ps)))
    else:
        for _ in range(count):
            feed((grb(ps), grb(ps), grb(ps)))
    res = CheckResult("fuzz", ps, es)
    res.checked[op] = chk.count
    res.mismatches = chk.mismatches
    return res


def _run_exhaustive_shard(task) -> CheckResult:
    op, ps, es, lo, hi, fma_seed, fma_count = task
    chk = _Checker(op, ps, es)
    feed = chk.feed
    n = 1 << ps
    if chk.arity == 3:
        # full triple space is out of reach even at ps=8; seeded sample
        rng = random.Random(fma_seed)
        for tup in _tuples_special(ps, 3):
            feed(tup)
        for _ in range(fma_count):
            feed((rng.getrandbits(ps), rng.getrandbits(ps), rng.getrandbits(ps)))
    elif chk.arity == 2:
        for a in range(lo, hi):
            for b in range(n):
                feed((a, b))
    else:
        if lo == 0:  # unary ops are cheap; run once on the first shard
            for a in range(n):
                feed((a,))
            if op in ("fcvt.w", "fcvt.wu", "fcvt.int", "fcvt.es"):
                # second pass flips the parity-driven mode selector
                for a in range(n):
                    feed((a,))
    res = CheckResult("exhaustive", ps, es)
    res.checked[op] = chk.count
    res.mismatches = chk.mismatches
    return res


def run_check(mode: str, ps: int, es: int, ops=None, seed: int = 0,
              count: int = 1_000_000, workers: int | None = None,
              fma_sample: int = 4096, counts: dict | None = None) -> CheckResult:
    """Run a conformance pass; returns the merged result across shards.

    ``counts`` overrides the fuzz case count per op name.
    """
    ops = ops_for(ps, ops)
    if workers is None:
        workers = min(os.cpu_count() or 1, 8)
    tasks = []
    if mode == "fuzz":
        shards = max(workers, 1)
        for op in ops:
            op_count = counts.get(op, count) if counts else count
            per = (op_count + shards - 1) // shards
            for s in range(shards):
                tasks.append((op, ps, es, _shard_seed(seed, op, es, s),
                              per, s == 0))
        runner = _run_fuzz_shard
    elif mode == "exhaustive":
        if ps > 16:
            raise ValueError("exhaustive mode is limited to ps <= 16")
        n = 1 << ps
        step = max(n // max(workers, 1), 1)
        for op in ops:
            if OP_ARITY[op] == 2:
                for lo in range(0, n, step):
                    tasks.append((op, ps, es, lo, min(lo + step, n), 0, 0))
            else:
                tasks.append((op, ps, es, 0, n, _shard_seed(seed, op, es, 0),
                              fma_sample))
        runner = _run_exhaustive_shard
    else:
        raise ValueError(f"unknown mode {mode!r}")

    total = CheckResult(mode, ps, es)
    if workers <= 1 or len(tasks) == 1:
        for t in tasks:
            total.merge(runner(t))
    else:
        with multiprocessing.Pool(workers) as pool:
            for res in pool.imap_unordered(runner, tasks):
                total.merge(res)
    return total
