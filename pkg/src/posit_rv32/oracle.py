"""Exact rational ground truth for posit words and correct rounding.

This module is the arbiter every arithmetic datapath is tested against. It
values posit words as exact ``fractions.Fraction`` objects straight from the
format definition, and projects arbitrary rationals back onto the posit
lattice by locating the bracketing representables and comparing against their
exact arithmetic midpoint. None of the encoder's shift/sticky machinery is
shared with (or even resembles) the code under test.

Values are ``Fraction`` instances; the two reserved posit states are the
module singletons ``ZERO`` (a plain ``Fraction(0)``) and ``NAR``.
"""

from __future__ import annotations

import math
from fractions import Fraction


class _NaR:
    """Singleton marker for Not-a-Real."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NaR"


NAR = _NaR()
ZERO = Fraction(0)


def _ilog2(n: int, d: int) -> int:
    """floor(log2(n/d)) for positive n, d by exact comparison."""
    e = n.bit_length() - d.bit_length()
    if e >= 0:
        if n < d << e:
            e -= 1
    elif n << -e < d:
        e -= 1
    return e


def _regime_len(k: int) -> int:
    # run plus terminator; the terminator may fall off the end of the word,
    # which only matters for field widths, not for this bound
    return k + 2 if k >= 0 else 1 - k


def _mag_fields(w: int, ps: int, es: int):
    """(exponent, fraction, fraction_len) of a positive magnitude pattern."""
    nbody = ps - 1
    body = w & ((1 << nbody) - 1)
    if (body >> (nbody - 1)) & 1:
        run = nbody - ((~body) & ((1 << nbody) - 1)).bit_length()
        k = run - 1
    else:
        run = nbody - body.bit_length()
        k = -run
    tail_len = nbody - run - 1
    e = 0
    frac = 0
    fr_len = 0
    if tail_len > 0:
        tail = body & ((1 << tail_len) - 1)
        if tail_len >= es:
            e = tail >> (tail_len - es) if es else 0
            fr_len = tail_len - es
            frac = tail & ((1 << fr_len) - 1)
        else:
            e = tail << (es - tail_len)
    return (k << es) + e, frac, fr_len


def exact_value(word: int, ps: int, es: int):
    """Exact value of a posit word: Fraction, ZERO, or NAR."""
    if word == 0:
        return ZERO
    if word == 1 << (ps - 1):
        return NAR
    sign = word >> (ps - 1)
    mag = (-word) & ((1 << ps) - 1) if sign else word
    exp, frac, fr_len = _mag_fields(mag, ps, es)
    m = (1 << fr_len) | frac
    p2 = exp - fr_len
    if p2 >= 0:
        v = Fraction(m << p2)
    else:
        v = Fraction(m, 1 << -p2)
    return -v if sign else v


def _mag_dyadic(w: int, ps: int, es: int) -> tuple[int, int]:
    """Magnitude pattern value as (mantissa, pow2): value = mant * 2**pow2."""
    exp, frac, fr_len = _mag_fields(w, ps, es)
    return (1 << fr_len) | frac, exp - fr_len


def _floor_pattern(n: int, d: int, e: int, ps: int, es: int) -> int:
    """Largest magnitude pattern whose value is <= n/d (given 2^e <= n/d)."""
    k = e >> es
    rl = _regime_len(k)
    rem = ps - 1 - rl
    run = (((1 << (k + 1)) - 1) << 1) if k >= 0 else 1
    if rem >= es:
        fb = rem - es
        shift = fb - e
        t = (n << shift) // d if shift >= 0 else n // (d << -shift)
        eb = e & ((1 << es) - 1)
        return ((run << es | eb) << fb) | (t - (1 << fb))
    # exponent field truncated by the regime: the lattice holds only the
    # exponents whose low bits vanish
    gap = es - rem
    eb = e & ((1 << es) - 1)
    return (run << rem) | (eb >> gap)


def round_to_posit(x, ps: int, es: int) -> int:
    """Nearest posit word to an exact value, ties to the even pattern.

    Magnitudes at or above maxpos give maxpos; nonzero magnitudes at or below
    minpos give minpos (a posit never rounds to zero); exact zero gives the
    zero word.
    """
    if x is NAR:
        return 1 << (ps - 1)
    if x == 0:
        return 0
    sign = x < 0
    n, d = abs(x.numerator), x.denominator
    max_exp = (ps - 2) << es
    if n >= d << max_exp:
        mag = (1 << (ps - 1)) - 1
    elif n << max_exp <= d:
        mag = 1
    else:
        e = _ilog2(n, d)
        mag = _floor_pattern(n, d, e, ps, es)
        m0, p0 = _mag_dyadic(mag, ps, es)
        m1, p1 = _mag_dyadic(mag + 1, ps, es)
        # compare n/d against (m0*2^p0 + m1*2^p1)/2 exactly
        pmin = min(p0, p1)
        mid2 = (m0 << (p0 - pmin)) + (m1 << (p1 - pmin))  # midpoint * 2^(1-pmin)
        scale = 1 - pmin
        lhs = n << scale if scale >= 0 else n
        rhs = d * mid2 if scale >= 0 else (d * mid2) << -scale
        if lhs > rhs:
            mag += 1
        elif lhs == rhs:
            mag += mag & 1
    return ((-mag) & ((1 << ps) - 1)) if sign else mag


def is_exact(x, ps: int, es: int) -> bool:
    """True when x is exactly representable in the given posit format."""
    if x is NAR:
        return True
    w = round_to_posit(x, ps, es)
    return exact_value(w, ps, es) == x


# ---------------------------------------------------------------------------
# exact operations with posit NaR propagation


def oracle_add(a, b):
    if a is NAR or b is NAR:
        return NAR
    return a + b


def oracle_sub(a, b):
    if a is NAR or b is NAR:
        return NAR
    return a - b


def oracle_mul(a, b):
    if a is NAR or b is NAR:
        return NAR
    return a * b


def oracle_fma(a, b, c, negate_product=False, subtract=False):
    """Exact +-(a*b) +- c matching the four fused instruction shapes."""
    if a is NAR or b is NAR or c is NAR:
        return NAR
    prod = -(a * b) if negate_product else a * b
    return prod + (-c if subtract else c)


def oracle_div(a, b):
    if a is NAR or b is NAR or b == 0:
        return NAR
    if a == 0:
        return ZERO
    return a / b


class SqrtResult:
    """Root of a nonnegative rational: exact value or a shrinking bracket.

    For irrational roots, ``round`` refines a dyadic enclosure until both
    endpoints land on the same posit, which is then the correctly rounded
    result (the true root can never sit exactly on a rounding boundary).
    """

    def __init__(self, value):
        if value is NAR or value < 0:
            self.exact = NAR
            return
        if value == 0:
            self.exact = ZERO
            return
        n, d = value.numerator, value.denominator
        rn, rd = math.isqrt(n), math.isqrt(d)
        if rn * rn == n and rd * rd == d:
            self.exact = Fraction(rn, rd)
        else:
            self.exact = None
            self._n, self._d = n, d

    def bracket(self, prec: int) -> tuple[Fraction, Fraction]:
        w = math.isqrt((self._n << (2 * prec)) // self._d)
        return Fraction(w, 1 << prec), Fraction(w + 2, 1 << prec)

    def round(self, ps: int, es: int) -> int:
        if self.exact is not None:
            return round_to_posit(self.exact, ps, es)
        prec = ps + 8
        for _ in range(16):
            lo, hi = self.bracket(prec)
            wlo = round_to_posit(lo, ps, es)
            whi = round_to_posit(hi, ps, es)
            if wlo == whi:
                return wlo
            prec *= 2
        raise AssertionError("square root enclosure failed to converge")


def oracle_sqrt(a):
    return SqrtResult(a)


def oracle_to_int(x, ps: int, unsigned: bool, round_to_zero: bool) -> int:
    """Posit value to a ps-bit integer pattern: RNE or RTZ, saturating.

    NaR maps to the NaR-shaped pattern (MSB set) for both signed and
    unsigned conversions.
    """
    if x is NAR:
        return 1 << (ps - 1)
    n, d = abs(x.numerator), x.denominator
    q, r = divmod(n, d)
    if not round_to_zero:
        r2 = 2 * r
        if r2 > d or (r2 == d and q & 1):
            q += 1
    v = -q if x < 0 else q
    if unsigned:
        v = min(max(v, 0), (1 << ps) - 1)
    else:
        v = min(max(v, -(1 << (ps - 1))), (1 << (ps - 1)) - 1)
    return v & ((1 << ps) - 1)


def oracle_from_int(i: int, ps: int, es: int, unsigned: bool) -> int:
    """ps-bit integer pattern to the nearest posit word."""
    v = i if unsigned else (i - (1 << ps) if i & (1 << (ps - 1)) else i)
    return round_to_posit(Fraction(v), ps, es)


def order_key(x):
    """Total order over posit values with NaR below every real."""
    return (0, 0) if x is NAR else (1, x)


# ---------------------------------------------------------------------------
# batch interface: "op hexA hexB hexC es" per line -> "hexResult"

_BATCH_BINARY = {
    "add": oracle_add,
    "sub": oracle_sub,
    "mul": oracle_mul,
    "div": oracle_div,
}

_BATCH_FMA = {
    "fmadd": (False, False),
    "fmsub": (False, True),
    "fnmsub": (True, False),
    "fnmadd": (True, True),
}


def batch_eval_line(line: str) -> str:
    """Evaluate one test vector; operands are 0x-hex words, '-' if unused.

    The posit size is inferred from the hex digit count of operand A.
    """
    op, ha, hb, hc, es_s = line.split()
    ps = (len(ha) - 2) * 4
    es = int(es_s)
    a = exact_value(int(ha, 16), ps, es)
    if op in _BATCH_BINARY:
        b = exact_value(int(hb, 16), ps, es)
        res = round_to_posit(_BATCH_BINARY[op](a, b), ps, es)
    elif op in _BATCH_FMA:
        ng, sub = _BATCH_FMA[op]
        b = exact_value(int(hb, 16), ps, es)
        c = exact_value(int(hc, 16), ps, es)
        res = round_to_posit(oracle_fma(a, b, c, ng, sub), ps, es)
    elif op == "sqrt":
        res = oracle_sqrt(a).round(ps, es)
    else:
        raise ValueError(f"unknown batch op {op!r}")
    return f"0x{res:0{ps // 4}X}"


def batch_eval(lines) -> list[str]:
    return [batch_eval_line(s) for s in lines if s.strip()]
