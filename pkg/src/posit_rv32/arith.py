"""Posit FPU compute operations.

Every operation decodes its operands, runs an integer datapath wide enough
for a single correct rounding, and hands an unrounded (significand, exponent,
sticky) triple to the shared encoder. Fraction division and square root use
iterative non-restoring algorithms that return a remainder, whose any-nonzero
reduction is the sticky bit.

No operation raises an exception flag except division, which reports DZ for a
zero divisor.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    FLAG_DZ,
    PositConfig,
    decode_bits,
    encode_bits,
    min_sig_width,
    nar_pattern,
    negate,
    sword,
)


@dataclass(frozen=True)
class FmaControl:
    """Semantic switches for the fused multiply-add datapath.

    The seven instructions backed by this one block:

    ==========  ==============  ===============================
    op          control         operand forcing
    ==========  ==============  ===============================
    FMADD.S     ( ,  )          none:  a*b + c
    FMSUB.S     ( , sub)        none:  a*b - c
    FNMSUB.S    (neg, )         none: -(a*b) + c
    FNMADD.S    (neg, sub)      none: -(a*b) - c
    FADD.S      ( ,  )          b forced to 1.0:  a + c
    FSUB.S      ( , sub)        b forced to 1.0:  a - c
    FMUL.S      ( ,  )          c forced to 0:    a * b
    ==========  ==============  ===============================
    """

    negate_product: bool = False
    subtract: bool = False


FMADD = FmaControl(False, False)
FMSUB = FmaControl(False, True)
FNMSUB = FmaControl(True, False)
FNMADD = FmaControl(True, True)


def _one_word(ps: int) -> int:
    # 1.0 encodes as 0b01 followed by zeros for every (ps, es)
    return 1 << (ps - 2)


def check_mul_overflow(prod: int, exp: int, fs: int) -> tuple[int, int]:
    """Fold a product in [1,4) back to [1,2): a carry bumps the exponent."""
    if prod.bit_length() == 2 * fs + 2:
        return prod, exp + 1
    return prod, exp


def check_add_overflow(sig: int, exp: int, width: int, sticky: int):
    """Fold an addition carry: shift right one, the dropped bit joins sticky."""
    if sig.bit_length() > width:
        return sig >> 1, exp + 1, sticky | (sig & 1)
    return sig, exp, sticky


def normalize(sig: int, exp: int, width: int) -> tuple[int, int]:
    """Renormalize after cancellation: the exponent drops by the zero count.

    The significand value is left untouched and is subsequently referenced at
    its own bit length, so a sticky tail keeps its sub-ulp weight (a physical
    left shift would scale the tail past one ulp).
    """
    return sig, exp - (width - sig.bit_length())


def fma(a: int, b: int, c: int, ctl: FmaControl, cfg: PositConfig) -> int:
    """round(+-(a*b) +- c) with one rounding; any NaR operand gives NaR."""
    ps, es, fs = cfg.ps, cfg.es, cfg.fs
    s1, e1, f1, z1, n1 = decode_bits(a, ps, es)
    s2, e2, f2, z2, n2 = decode_bits(b, ps, es)
    s3, e3, f3, z3, n3 = decode_bits(c, ps, es)
    if n1 or n2 or n3:
        return nar_pattern(ps)

    s3 ^= ctl.subtract
    rs = s1 ^ s2 ^ ctl.negate_product
    prod_zero = z1 or z2
    if prod_zero and z3:
        return 0
    if prod_zero:
        # result is +-c exactly
        return encode_bits(s3, e3, f3, fs + 1, 0, ps, es)

    width = max(2 * fs + 4, (1 << es) + 2)
    prod, pe = check_mul_overflow(f1 * f2, e1 + e2, fs)
    rf = prod << (width - prod.bit_length())
    if z3:
        return encode_bits(rs, pe, rf, width, 0, ps, es)

    af = f3 << (width - 1 - fs)
    if e3 > pe or (e3 == pe and af > rf):
        rf, af = af, rf
        pe, e3 = e3, pe
        rs, s3 = s3, rs

    ediff = pe - e3
    if ediff >= width:
        shifted, lost = 0, 1
    else:
        shifted = af >> ediff
        lost = 1 if af & ((1 << ediff) - 1) else 0

    if rs == s3:
        total = rf + shifted
        total, pe, lost = check_add_overflow(total, pe, width, lost)
        return encode_bits(rs, pe, total, width, lost, ps, es)
    # borrow correction keeps the truncated tail positive
    total = rf - shifted - lost
    if total == 0:
        return 0  # exact cancellation is a true zero, never minpos
    total, pe = normalize(total, pe, width)
    return encode_bits(rs, pe, total, total.bit_length(), lost, ps, es)


def add(a: int, b: int, cfg: PositConfig) -> int:
    return fma(a, _one_word(cfg.ps), b, FMADD, cfg)


def sub(a: int, b: int, cfg: PositConfig) -> int:
    return fma(a, _one_word(cfg.ps), b, FMSUB, cfg)


def mul(a: int, b: int, cfg: PositConfig) -> int:
    return fma(a, b, 0, FMADD, cfg)


def nonrestoring_divide(num: int, den: int, nbits: int) -> tuple[int, int]:
    """Non-restoring division of num by den over nbits dividend bits.

    Returns (floor(num/den), remainder). Quotient digits are +-1 encoded by
    the sign of the partial remainder before each step; the final negative
    remainder is repaired by one add-back.
    """
    r = 0
    acc = 0
    for i in range(nbits - 1, -1, -1):
        bit = (num >> i) & 1
        if r >= 0:
            acc = (acc << 1) | 1
            r = ((r << 1) | bit) - den
        else:
            acc <<= 1
            r = ((r << 1) | bit) + den
    q = 2 * acc - ((1 << nbits) - 1)
    if r < 0:
        q -= 1
        r += den
    return q, r


def nonrestoring_sqrt(d: int, nbits: int) -> tuple[int, int]:
    """Non-restoring square root over nbits result bits (2 radicand bits each).

    Returns (floor(sqrt(d)), d - root**2) for d < 4**nbits.
    """
    q = 0
    r = 0
    for i in range(nbits - 1, -1, -1):
        pair = (d >> (2 * i)) & 3
        if r >= 0:
            r = ((r << 2) | pair) - ((q << 2) | 1)
        else:
            r = ((r << 2) | pair) + ((q << 2) | 3)
        q = (q << 1) | (1 if r >= 0 else 0)
    if r < 0:
        r += (q << 1) | 1
    return q, r


def div(a: int, b: int, cfg: PositConfig) -> tuple[int, int]:
    """a / b; returns (word, flags). A zero divisor yields NaR and DZ."""
    ps, es, fs = cfg.ps, cfg.es, cfg.fs
    s1, e1, f1, z1, n1 = decode_bits(a, ps, es)
    s2, e2, f2, z2, n2 = decode_bits(b, ps, es)
    flags = FLAG_DZ if z2 else 0
    if n1 or n2 or z2:
        return nar_pattern(ps), flags
    if z1:
        return 0, 0
    nbits = min_sig_width(ps, es)
    q, rem = nonrestoring_divide(f1 << nbits, f2, fs + 1 + nbits)
    w = q.bit_length()
    exp = e1 - e2 + w - 1 - nbits
    return encode_bits(s1 ^ s2, exp, q, w, 1 if rem else 0, ps, es), 0


def sqrt(a: int, cfg: PositConfig) -> int:
    """Square root; negative or NaR input gives NaR, zero gives zero."""
    ps, es, fs = cfg.ps, cfg.es, cfg.fs
    s1, e1, f1, z1, n1 = decode_bits(a, ps, es)
    if n1 or s1:
        return nar_pattern(ps)
    if z1:
        return 0
    scaled_exp = e1 - fs
    shift = 2 * (min_sig_width(ps, es) + 1) - fs
    shift += (scaled_exp - shift) & 1  # keep the remaining exponent even
    root, rem = nonrestoring_sqrt(f1 << shift, (fs + 1 + shift + 1) // 2)
    w = root.bit_length()
    exp = (scaled_exp - shift) // 2 + w - 1
    return encode_bits(0, exp, root, w, 1 if rem else 0, ps, es)


def int_to_posit(i: int, cfg: PositConfig, unsigned: bool = False) -> int:
    """ps-bit integer pattern to posit (round to nearest even)."""
    ps, es = cfg.ps, cfg.es
    i &= (1 << ps) - 1
    if i == 0:
        return 0
    sign = 0 if unsigned else (i >> (ps - 1)) & 1
    mag = ((-i) & ((1 << ps) - 1)) if sign else i
    w = mag.bit_length()
    return encode_bits(sign, w - 1, mag, w, 0, ps, es)


def posit_to_int(p: int, cfg: PositConfig, unsigned: bool = False,
                 round_to_zero: bool = False) -> int:
    """Posit to ps-bit integer pattern; saturating, RNE or RTZ.

    NaR converts to the NaR-shaped pattern for both signed and unsigned.
    """
    ps, es, fs = cfg.ps, cfg.es, cfg.fs
    s, exp, f, z, nar = decode_bits(p, ps, es)
    if nar:
        return 1 << (ps - 1)
    if z:
        return 0
    if exp >= fs:
        mag = f << (exp - fs)
    else:
        drop = fs - exp
        mag = f >> drop
        if not round_to_zero and drop <= fs + 1:
            rb = (f >> (drop - 1)) & 1
            rest = f & ((1 << (drop - 1)) - 1)
            if rb and (rest or mag & 1):
                mag += 1
    v = -mag if s else mag
    if unsigned:
        v = min(max(v, 0), (1 << ps) - 1)
    else:
        v = min(max(v, -(1 << (ps - 1))), (1 << (ps - 1)) - 1)
    return v & ((1 << ps) - 1)


def compare_eq(a: int, b: int) -> bool:
    return a == b


def compare_lt(a: int, b: int, ps: int) -> bool:
    return sword(a, ps) < sword(b, ps)


def compare_le(a: int, b: int, ps: int) -> bool:
    return sword(a, ps) <= sword(b, ps)


def minnum(a: int, b: int, ps: int) -> int:
    """Smaller operand under the signed-pattern order (NaR is smallest)."""
    return a if sword(a, ps) <= sword(b, ps) else b


def maxnum(a: int, b: int, ps: int) -> int:
    return a if sword(a, ps) >= sword(b, ps) else b


def compare(a: int, b: int, kind: str, ps: int):
    """Dispatcher over {EQ, LT, LE, MIN, MAX}."""
    if kind == "EQ":
        return compare_eq(a, b)
    if kind == "LT":
        return compare_lt(a, b, ps)
    if kind == "LE":
        return compare_le(a, b, ps)
    if kind == "MIN":
        return minnum(a, b, ps)
    if kind == "MAX":
        return maxnum(a, b, ps)
    raise ValueError(f"unknown comparison {kind!r}")


def sign_inject(a: int, b: int, kind: str, ps: int) -> int:
    """Magnitude of a with a sign taken from b (SGNJ/SGNJN/SGNJX).

    A sign change is a two's complement, so zero and NaR pass through.
    """
    sa = (a >> (ps - 1)) & 1
    sb = (b >> (ps - 1)) & 1
    if kind == "SGNJ":
        target = sb
    elif kind == "SGNJN":
        target = sb ^ 1
    elif kind == "SGNJX":
        target = sa ^ sb
    else:
        raise ValueError(f"unknown sign injection {kind!r}")
    return negate(a, ps) if target != sa else a


# classification mask bits, aligned with the FCLASS slots existing software
# expects: negative normal, +0, positive normal, quiet NaN
CLASS_NEGATIVE = 1 << 1
CLASS_ZERO = 1 << 4
CLASS_POSITIVE = 1 << 6
CLASS_NAR = 1 << 9


def classify(p: int, ps: int) -> int:
    """10-bit category mask with exactly one bit set."""
    if p == 0:
        return CLASS_ZERO
    if p == 1 << (ps - 1):
        return CLASS_NAR
    return CLASS_NEGATIVE if p >> (ps - 1) else CLASS_POSITIVE


def convert_es(p: int, from_es: int, to_es: int, ps: int = 32) -> int:
    """Re-encode a word from one es interpretation to another (RNE).

    Only the dynamic-switching pair {2, 3} is accepted.
    """
    if from_es not in (2, 3) or to_es not in (2, 3):
        raise ValueError("es conversion supports es in {2, 3} only")
    s, exp, f, z, nar = decode_bits(p, ps, from_es)
    if nar:
        return nar_pattern(ps)
    if z:
        return 0
    return encode_bits(s, exp, f, ps - from_es - 2, 0, ps, to_es)
