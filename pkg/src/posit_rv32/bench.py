"""Accuracy benchmarks: power series and a 128-point FFT, three ways.

Each workload is evaluated with identical operation structure in three
number systems: 32-bit posits (es=2), IEEE binary32 (numpy float32), and a
binary64 reference. Reported metrics are the mean percentage error of the
posit and float32 runs against the reference, with 95% confidence
intervals. Samples whose reference value is zero are excluded from the mean.

The posit evaluation runs either through the RV32 simulator (guest kernels
assembled here; the default) or directly through the arithmetic layer. Both
must agree bit for bit - the test suite checks that - so the engines differ
only in speed.

Fixed algorithm choices, shared by all three precisions: sine/cosine by an
exact integer quadrant reduction of the degree argument into [-45, 45]
followed by a 10-term Taylor series (sine or cosine core picked per
quadrant) with incrementally computed integer divisors; exponential by an
unreduced 20-term series; FFT by iterative radix-2 decimation in time with
twiddles stored in the precision under test, then a polar conversion whose
angle uses an octant-reduced 10-term arctangent series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import arith, oracle
from .asm import Assembler
from .core import PositConfig
from .sim import SimConfig, Simulator, load_image

SIN_TERMS = 9  # after the leading x: 10 terms total
COS_TERMS = 9
EXP_TERMS = 19
ATAN_TERMS = 9
FFT_N = 128

ES_BENCH = 2  # the max-precision mode


# ── number-system adapters ──────────────────────────────────────────


class PositOps:
    """Posit words as values; every op is the bit-exact FPU operation."""

    def __init__(self, cfg: PositConfig):
        self.cfg = cfg

    def from_int(self, i: int):
        return arith.int_to_posit(i, self.cfg)

    def const(self, x: Fraction):
        return oracle.round_to_posit(x, self.cfg.ps, self.cfg.es)

    def add(self, a, b):
        return arith.add(a, b, self.cfg)

    def sub(self, a, b):
        return arith.sub(a, b, self.cfg)

    def mul(self, a, b):
        return arith.mul(a, b, self.cfg)

    def div(self, a, b):
        return arith.div(a, b, self.cfg)[0]

    def sqrt(self, a):
        return arith.sqrt(a, self.cfg)

    def neg(self, a):
        return arith.sign_inject(a, a, "SGNJN", self.cfg.ps)

    def abs(self, a):
        return arith.sign_inject(a, a, "SGNJX", self.cfg.ps)

    def lt(self, a, b):
        return arith.compare_lt(a, b, self.cfg.ps)

    def to_float(self, a):
        v = oracle.exact_value(a, self.cfg.ps, self.cfg.es)
        return float("nan") if v is oracle.NAR else float(v)


class Float32Ops:
    def from_int(self, i: int):
        return np.float32(i)

    def const(self, x: Fraction):
        return np.float32(float(x))

    add = staticmethod(lambda a, b: np.float32(a + b))
    sub = staticmethod(lambda a, b: np.float32(a - b))
    mul = staticmethod(lambda a, b: np.float32(a * b))
    div = staticmethod(lambda a, b: np.float32(a / b))
    sqrt = staticmethod(lambda a: np.float32(np.sqrt(a)))
    neg = staticmethod(lambda a: np.float32(-a))
    abs = staticmethod(lambda a: np.float32(abs(a)))
    lt = staticmethod(lambda a, b: bool(a < b))
    to_float = staticmethod(float)


class Float64Ops:
    def from_int(self, i: int):
        return float(i)

    def const(self, x: Fraction):
        return float(x)

    add = staticmethod(lambda a, b: a + b)
    sub = staticmethod(lambda a, b: a - b)
    mul = staticmethod(lambda a, b: a * b)
    div = staticmethod(lambda a, b: a / b)
    sqrt = staticmethod(math.sqrt)
    neg = staticmethod(lambda a: -a)
    abs = staticmethod(abs)
    lt = staticmethod(lambda a, b: a < b)
    to_float = staticmethod(float)


PI = Fraction(math.pi)  # binary64 pi, the shared reference constant
PI_HALF = PI / 2
PI_OVER_180 = Fraction(math.pi / 180)


# ── shared algorithm structure (host evaluation) ────────────────────


def _quadrant(deg: int, cos_shift: bool):
    """Exact integer reduction: quadrant index and r in [-45, 45] degrees.

    cos(d) is evaluated as sin(d + 90), so both functions share one table:
    quadrant 0 -> sin(r), 1 -> cos(r), 2 -> -sin(r), 3 -> -cos(r).
    """
    t = deg + (90 if cos_shift else 0) + 45
    idx = 0
    while t >= 90:
        t -= 90
        idx += 1
    return idx & 3, t - 45


def _sin_core(ops, x, x2n):
    term = x
    acc = x
    den, inc = 6, 14  # den_k = 2k(2k+1); first differences grow by 8
    for _ in range(SIN_TERMS):
        term = ops.div(ops.mul(term, x2n), ops.from_int(den))
        acc = ops.add(acc, term)
        den += inc
        inc += 8
    return acc


def _cos_core(ops, x2n):
    term = ops.from_int(1)
    acc = term
    den, inc = 2, 10  # den_k = (2k-1)(2k)
    for _ in range(COS_TERMS):
        term = ops.div(ops.mul(term, x2n), ops.from_int(den))
        acc = ops.add(acc, term)
        den += inc
        inc += 8
    return acc


def trig_series(ops, deg: int, which: str):
    idx, r = _quadrant(deg, which == "cos")
    x = ops.mul(ops.from_int(r), ops.const(PI_OVER_180))
    x2n = ops.neg(ops.mul(x, x))
    acc = _cos_core(ops, x2n) if idx & 1 else _sin_core(ops, x, x2n)
    return ops.neg(acc) if idx & 2 else acc


def sin_series(ops, deg: int):
    return trig_series(ops, deg, "sin")


def cos_series(ops, deg: int):
    return trig_series(ops, deg, "cos")


def exp_series(ops, x: int):
    xp = ops.from_int(x)
    term = ops.from_int(1)
    acc = term
    for k in range(1, EXP_TERMS + 1):
        term = ops.div(ops.mul(term, xp), ops.from_int(k))
        acc = ops.add(acc, term)
    return acc


def atan2_series(ops, y, x):
    ax = ops.abs(x)
    ay = ops.abs(y)
    swap = ops.lt(ax, ay)
    t = ops.div(ax, ay) if swap else ops.div(ay, ax)
    t2n = ops.neg(ops.mul(t, t))
    power = t
    acc = t
    den = 3
    for _ in range(ATAN_TERMS):
        power = ops.mul(power, t2n)
        acc = ops.add(acc, ops.div(power, ops.from_int(den)))
        den += 2
    if swap:
        acc = ops.sub(ops.const(PI_HALF), acc)
    if ops.lt(x, ops.from_int(0)):
        acc = ops.sub(ops.const(PI), acc)
    if ops.lt(y, ops.from_int(0)):
        acc = ops.neg(acc)
    return acc


def fft_inputs(ops):
    """Complex test vector: re = cos(i), im = sin(i) for i = 0..127."""
    re = [ops.const(Fraction(math.cos(i))) for i in range(FFT_N)]
    im = [ops.const(Fraction(math.sin(i))) for i in range(FFT_N)]
    return re, im


def fft_twiddles(ops):
    wr = [ops.const(Fraction(math.cos(-2 * math.pi * j / FFT_N)))
          for j in range(FFT_N // 2)]
    wi = [ops.const(Fraction(math.sin(-2 * math.pi * j / FFT_N)))
          for j in range(FFT_N // 2)]
    return wr, wi


def _bitrev(i: int, bits: int = 7) -> int:
    out = 0
    for _ in range(bits):
        out = (out << 1) | (i & 1)
        i >>= 1
    return out


def fft_butterfly_plan():
    """Static (i0, i1, twiddle) schedule of the radix-2 DIT stages."""
    plan = []
    size = 2
    while size <= FFT_N:
        half = size // 2
        tstep = FFT_N // size
        for start in range(0, FFT_N, size):
            for j in range(half):
                plan.append((start + j, start + j + half, j * tstep))
        size *= 2
    return plan


def fft128(ops, re, im):
    re = list(re)
    im = list(im)
    for i in range(FFT_N):
        j = _bitrev(i)
        if i < j:
            re[i], re[j] = re[j], re[i]
            im[i], im[j] = im[j], im[i]
    wr, wi = fft_twiddles(ops)
    for i0, i1, tw in fft_butterfly_plan():
        tr = ops.sub(ops.mul(wr[tw], re[i1]), ops.mul(wi[tw], im[i1]))
        ti = ops.add(ops.mul(wr[tw], im[i1]), ops.mul(wi[tw], re[i1]))
        re[i1] = ops.sub(re[i0], tr)
        im[i1] = ops.sub(im[i0], ti)
        re[i0] = ops.add(re[i0], tr)
        im[i0] = ops.add(im[i0], ti)
    return re, im


def fft_polar(ops, re, im):
    mags = []
    angs = []
    for r, i in zip(re, im):
        mags.append(ops.sqrt(ops.add(ops.mul(r, r), ops.mul(i, i))))
        angs.append(atan2_series(ops, i, r))
    return mags, angs


# ── guest kernels (simulator engine) ────────────────────────────────


def _emit_trig_kernel(a: Assembler, pops: PositOps, which: str):
    """sin/cos over integer degrees 0..359; results stored at label 'out'.

    Mirrors trig_series exactly: integer quadrant reduction to [-45, 45],
    then the sine or cosine Taylor core, then a quadrant sign flip.
    """
    a.la("s3", "pi180")
    a.flw("p6", "s3", 0)
    a.la("s1", "out")
    a.li("s0", 0)
    a.label("loop")
    a.mv("t0", "s0")
    if which == "cos":
        a.addi("t0", "t0", 90)  # cos(d) = sin(d + 90)
    a.addi("t0", "t0", 45)
    a.li("s2", 0)  # quadrant index
    a.li("t1", 90)
    a.label("redloop")
    a.blt("t0", "t1", "reduced")
    a.sub("t0", "t0", "t1")
    a.addi("s2", "s2", 1)
    a.j("redloop")
    a.label("reduced")
    a.addi("t0", "t0", -45)  # r in [-45, 45]
    a.andi("s2", "s2", 3)
    a.fcvt_s_w("p1", "t0")
    a.fmul_s("p1", "p1", "p6")  # x = r * pi/180
    a.fmul_s("p2", "p1", "p1")
    a.fsgnjn_s("p2", "p2", "p2")  # -x^2
    a.andi("t2", "s2", 1)
    a.bne("t2", "zero", "coscore")
    a.fsgnj_s("p3", "p1", "p1")  # term = x
    a.fsgnj_s("p4", "p1", "p1")  # acc = x
    a.li("t3", 6)
    a.li("t4", 14)
    a.li("t5", SIN_TERMS)
    a.j("termloop")
    a.label("coscore")
    a.li("t6", 1)
    a.fcvt_s_w("p3", "t6")  # term = 1
    a.fsgnj_s("p4", "p3", "p3")
    a.li("t3", 2)
    a.li("t4", 10)
    a.li("t5", COS_TERMS)
    a.label("termloop")
    a.fcvt_s_w("p5", "t3")
    a.fmul_s("p3", "p3", "p2")
    a.fdiv_s("p3", "p3", "p5")
    a.fadd_s("p4", "p4", "p3")
    a.add("t3", "t3", "t4")
    a.addi("t4", "t4", 8)
    a.addi("t5", "t5", -1)
    a.bne("t5", "zero", "termloop")
    a.andi("t2", "s2", 2)
    a.beq("t2", "zero", "store")
    a.fsgnjn_s("p4", "p4", "p4")
    a.label("store")
    a.fsw("p4", "s1", 0)
    a.addi("s1", "s1", 4)
    a.addi("s0", "s0", 1)
    a.li("t1", 360)
    a.blt("s0", "t1", "loop")
    a.halt()
    a.label("pi180")
    a.word(pops.const(PI_OVER_180))
    a.label("out")
    a.zeros(360)


def _emit_exp_kernel(a: Assembler, pops: PositOps):
    a.la("s1", "out")
    a.li("s0", 0)
    a.label("loop")
    a.fcvt_s_w("p1", "s0")  # x
    a.li("t6", 1)
    a.fcvt_s_w("p3", "t6")  # term = 1
    a.fsgnj_s("p4", "p3", "p3")  # acc = 1
    a.li("t3", 1)
    a.li("t5", EXP_TERMS)
    a.label("terms")
    a.fcvt_s_w("p5", "t3")
    a.fmul_s("p3", "p3", "p1")
    a.fdiv_s("p3", "p3", "p5")
    a.fadd_s("p4", "p4", "p3")
    a.addi("t3", "t3", 1)
    a.addi("t5", "t5", -1)
    a.bne("t5", "zero", "terms")
    a.fsw("p4", "s1", 0)
    a.addi("s1", "s1", 4)
    a.addi("s0", "s0", 1)
    a.li("t1", 12)
    a.blt("s0", "t1", "loop")
    a.halt()
    a.label("out")
    a.zeros(12)


def _emit_fft_kernel(a: Assembler, pops: PositOps):
    """FFT butterflies unrolled at build time; polar pass loops in-guest."""
    re0, im0 = fft_inputs(pops)
    wr, wi = fft_twiddles(pops)

    a.la("s0", "re")
    a.la("s1", "im")
    a.la("s2", "wr")
    a.la("s3", "wi")
    # butterflies: the input arrays are stored already bit-reversed, so the
    # schedule is purely static
    for i0, i1, tw in fft_butterfly_plan():
        a.flw("p1", "s0", 4 * i1)   # re[i1]
        a.flw("p2", "s1", 4 * i1)   # im[i1]
        a.flw("p3", "s2", 4 * tw)   # wr
        a.flw("p4", "s3", 4 * tw)   # wi
        a.fmul_s("p5", "p3", "p1")
        a.fmul_s("p6", "p4", "p2")
        a.fsub_s("p5", "p5", "p6")  # tr
        a.fmul_s("p6", "p3", "p2")
        a.fmul_s("p7", "p4", "p1")
        a.fadd_s("p6", "p6", "p7")  # ti
        a.flw("p1", "s0", 4 * i0)
        a.flw("p2", "s1", 4 * i0)
        a.fsub_s("p7", "p1", "p5")
        a.fsw("p7", "s0", 4 * i1)
        a.fsub_s("p7", "p2", "p6")
        a.fsw("p7", "s1", 4 * i1)
        a.fadd_s("p7", "p1", "p5")
        a.fsw("p7", "s0", 4 * i0)
        a.fadd_s("p7", "p2", "p6")
        a.fsw("p7", "s1", 4 * i0)
    # polar conversion loop
    a.la("s4", "mag")
    a.la("s5", "ang")
    a.la("s6", "consts")
    a.li("s7", 0)
    a.label("polar")
    a.flw("p11", "s0", 0)  # x = re
    a.flw("p10", "s1", 0)  # y = im
    a.fmul_s("p1", "p11", "p11")
    a.fmul_s("p2", "p10", "p10")
    a.fadd_s("p1", "p1", "p2")
    a.fsqrt_s("p1", "p1")
    a.fsw("p1", "s4", 0)
    a.call("atan2")
    a.fsw("p12", "s5", 0)
    a.addi("s0", "s0", 4)
    a.addi("s1", "s1", 4)
    a.addi("s4", "s4", 4)
    a.addi("s5", "s5", 4)
    a.addi("s7", "s7", 1)
    a.li("t1", FFT_N)
    a.blt("s7", "t1", "polar")
    a.halt()

    # atan2(y=p10, x=p11) -> p12; octant reduction then the odd series
    a.label("atan2")
    a.fsgnjx_s("p13", "p11", "p11")  # |x|
    a.fsgnjx_s("p14", "p10", "p10")  # |y|
    a.flt_s("t0", "p13", "p14")
    a.beq("t0", "zero", "noswap")
    a.fdiv_s("p15", "p13", "p14")
    a.j("havet")
    a.label("noswap")
    a.fdiv_s("p15", "p14", "p13")
    a.label("havet")
    a.fmul_s("p16", "p15", "p15")
    a.fsgnjn_s("p16", "p16", "p16")
    a.fsgnj_s("p17", "p15", "p15")
    a.fsgnj_s("p12", "p15", "p15")
    a.li("t1", 3)
    a.li("t2", ATAN_TERMS)
    a.label("aloop")
    a.fmul_s("p17", "p17", "p16")
    a.fcvt_s_w("p18", "t1")
    a.fdiv_s("p18", "p17", "p18")
    a.fadd_s("p12", "p12", "p18")
    a.addi("t1", "t1", 2)
    a.addi("t2", "t2", -1)
    a.bne("t2", "zero", "aloop")
    a.beq("t0", "zero", "cont1")
    a.flw("p18", "s6", 0)  # pi/2
    a.fsub_s("p12", "p18", "p12")
    a.label("cont1")
    a.flt_s("t3", "p11", "p0")
    a.beq("t3", "zero", "cont2")
    a.flw("p18", "s6", 4)  # pi
    a.fsub_s("p12", "p18", "p12")
    a.label("cont2")
    a.flt_s("t3", "p10", "p0")
    a.beq("t3", "zero", "cont3")
    a.fsgnjn_s("p12", "p12", "p12")
    a.label("cont3")
    a.ret()

    a.label("consts")
    a.word(pops.const(PI_HALF))
    a.word(pops.const(PI))
    a.label("re")
    a.words(re0[_bitrev(i)] for i in range(FFT_N))
    a.label("im")
    a.words(im0[_bitrev(i)] for i in range(FFT_N))
    a.label("wr")
    a.words(wr)
    a.label("wi")
    a.words(wi)
    a.label("mag")
    a.zeros(FFT_N)
    a.label("ang")
    a.zeros(FFT_N)


def _run_kernel(emit, cfg: PositConfig, out_labels, fuel=20_000_000):
    pops = PositOps(cfg)
    a = Assembler()
    emit(a, pops)
    sim = Simulator(SimConfig(posit=cfg, mem_size=8 * 1024 * 1024))
    load_image(sim, a.assemble(), base=a.base)
    report = sim.run(fuel=fuel)
    if report.status != "ok":
        raise RuntimeError(f"benchmark kernel failed: {report.status} "
                           f"{report.trap_cause}")
    out = []
    for label, count in out_labels:
        addr = a.labels[label]
        out.append([sim.load(addr + 4 * i, 4) for i in range(count)])
    return out, report


def posit_sin_words(cfg, engine="sim"):
    if engine == "sim":
        (words,), _ = _run_kernel(lambda a, p: _emit_trig_kernel(a, p, "sin"),
                                  cfg, [("out", 360)])
        return words
    ops = PositOps(cfg)
    return [sin_series(ops, d) for d in range(360)]


def posit_cos_words(cfg, engine="sim"):
    if engine == "sim":
        (words,), _ = _run_kernel(lambda a, p: _emit_trig_kernel(a, p, "cos"),
                                  cfg, [("out", 360)])
        return words
    ops = PositOps(cfg)
    return [cos_series(ops, d) for d in range(360)]


def posit_exp_words(cfg, engine="sim"):
    if engine == "sim":
        (words,), _ = _run_kernel(_emit_exp_kernel, cfg, [("out", 12)])
        return words
    ops = PositOps(cfg)
    return [exp_series(ops, x) for x in range(12)]


def posit_fft_words(cfg, engine="sim"):
    if engine == "sim":
        (mag, ang), _ = _run_kernel(_emit_fft_kernel, cfg,
                                    [("mag", FFT_N), ("ang", FFT_N)])
        return mag, ang
    ops = PositOps(cfg)
    re, im = fft_inputs(ops)
    re, im = fft128(ops, re, im)
    mags, angs = fft_polar(ops, re, im)
    return mags, angs


# ── error statistics and reports ────────────────────────────────────


@dataclass
class ErrorStats:
    mean: float
    ci_lo: float
    ci_hi: float
    samples: int
    excluded: int

    @classmethod
    def from_errors(cls, errors, excluded):
        n = len(errors)
        mean = sum(errors) / n
        var = sum((e - mean) ** 2 for e in errors) / (n - 1) if n > 1 else 0.0
        half = 1.96 * math.sqrt(var / n) if n > 1 else 0.0
        return cls(mean, mean - half, mean + half, n, excluded)


def percent_errors(values, reference):
    errors = []
    excluded = 0
    for v, ref in zip(values, reference):
        if ref == 0:
            excluded += 1
            continue
        errors.append(abs((v - ref) / ref) * 100.0)
    return errors, excluded


@dataclass
class BenchReport:
    name: str
    engine: str
    posit: ErrorStats
    float32: ErrorStats

    @property
    def ratio(self) -> float:
        return self.float32.mean / self.posit.mean if self.posit.mean else math.inf

    @property
    def ci_disjoint(self) -> bool:
        return self.posit.ci_hi < self.float32.ci_lo

    def to_text(self) -> str:
        return "\n".join([
            f"bench: {self.name}",
            f"engine: {self.engine}",
            f"samples: {self.posit.samples}",
            f"excluded_zero_reference: {self.posit.excluded}",
            f"posit_mean_pct: {self.posit.mean:.6e}",
            f"posit_ci_lo_pct: {self.posit.ci_lo:.6e}",
            f"posit_ci_hi_pct: {self.posit.ci_hi:.6e}",
            f"float32_mean_pct: {self.float32.mean:.6e}",
            f"float32_ci_lo_pct: {self.float32.ci_lo:.6e}",
            f"float32_ci_hi_pct: {self.float32.ci_hi:.6e}",
            f"ratio: {self.ratio:.3f}",
            f"ci_disjoint: {'yes' if self.ci_disjoint else 'no'}",
        ])


def _stats(posit_vals, f32_vals, ref_vals):
    perr, pex = percent_errors(posit_vals, ref_vals)
    ferr, fex = percent_errors(f32_vals, ref_vals)
    return ErrorStats.from_errors(perr, pex), ErrorStats.from_errors(ferr, fex)


def run_bench(name: str, engine: str = "sim",
              cfg: PositConfig | None = None) -> list[BenchReport]:
    """Run one (or all) of the accuracy benchmarks."""
    cfg = cfg or PositConfig.fixed(32, ES_BENCH)
    pops = PositOps(cfg)
    f32 = Float32Ops()
    f64 = Float64Ops()
    reports = []

    if name in ("sin", "cos", "all"):
        for which, series, words_fn in (
                ("sin", sin_series, posit_sin_words),
                ("cos", cos_series, posit_cos_words)):
            if name not in (which, "all"):
                continue
            pv = [pops.to_float(w) for w in words_fn(cfg, engine)]
            fv = [float(series(f32, d)) for d in range(360)]
            rv = [series(f64, d) for d in range(360)]
            ps, fs = _stats(pv, fv, rv)
            reports.append(BenchReport(which, engine, ps, fs))
    if name in ("exp", "all"):
        pv = [pops.to_float(w) for w in posit_exp_words(cfg, engine)]
        fv = [float(exp_series(f32, x)) for x in range(12)]
        rv = [exp_series(f64, x) for x in range(12)]
        ps, fs = _stats(pv, fv, rv)
        reports.append(BenchReport("exp", engine, ps, fs))
    if name in ("fft", "all"):
        pmag, pang = posit_fft_words(cfg, engine)
        pmagf = [pops.to_float(w) for w in pmag]
        pangf = [pops.to_float(w) for w in pang]
        fre, fim = fft_inputs(f32)
        fre, fim = fft128(f32, fre, fim)
        fmag, fang = fft_polar(f32, fre, fim)
        rre, rim = fft_inputs(f64)
        rre, rim = fft128(f64, rre, rim)
        rmag, rang = fft_polar(f64, rre, rim)
        ps, fs = _stats(pmagf, [float(v) for v in fmag], rmag)
        reports.append(BenchReport("fft-magnitude", engine, ps, fs))
        ps, fs = _stats(pangf, [float(v) for v in fang], rang)
        reports.append(BenchReport("fft-angle", engine, ps, fs))
    if not reports:
        raise ValueError(f"unknown benchmark {name!r}")
    return reports
