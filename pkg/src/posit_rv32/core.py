"""Parameterized posit format: field extraction and round-to-nearest encoding.

A posit word is a ps-bit two's-complement pattern: sign, a run-length encoded
regime, up to ``es`` exponent bits, and a fraction with a hidden leading 1.
The two reserved patterns are zero (all zeros) and NaR (MSB set, rest zero).
Everything here is pure integer arithmetic on Python ints; words are
non-negative ints below ``2**ps``.

``decode_bits``/``encode_bits`` are the flat, allocation-free entry points
used by the arithmetic datapaths; ``decode``/``encode`` wrap them in the
``DecodedPosit``/``Unrounded`` record types.
"""

from __future__ import annotations

from dataclasses import dataclass

# fflags bit positions (RISC-V layout; only DZ is ever raised by posit ops)
FLAG_DZ = 1 << 3

SUPPORTED_PS = (8, 16, 32)


class EsModeError(ValueError):
    """Requested an es value the configuration does not allow."""


@dataclass(frozen=True)
class EsMode:
    """Exponent-size selection: either a fixed es or a runtime-switchable pair.

    In dual mode only es values 2 and 3 are legal; the ``es`` field holds the
    currently selected value.
    """

    legal: tuple[int, ...]
    es: int

    @classmethod
    def fixed(cls, es: int) -> "EsMode":
        return cls((es,), es)

    @classmethod
    def dual(cls, es: int = 2) -> "EsMode":
        if es not in (2, 3):
            raise EsModeError(f"dual mode supports es in {{2, 3}}, got {es}")
        return cls((2, 3), es)

    @property
    def is_dual(self) -> bool:
        return len(self.legal) > 1

    def with_es(self, es: int) -> "EsMode":
        if es not in self.legal:
            raise EsModeError(f"es={es} not in legal set {self.legal}")
        return EsMode(self.legal, es)


@dataclass(frozen=True)
class PositConfig:
    """Posit size and exponent-size mode, plus the derived field widths."""

    ps: int
    es_mode: EsMode

    def __post_init__(self):
        if self.ps not in SUPPORTED_PS:
            raise ValueError(f"unsupported posit size {self.ps}")
        if self.es_mode.is_dual and self.ps != 32:
            raise ValueError("dual es mode requires ps=32")
        for es in self.es_mode.legal:
            if not 0 <= es <= self.ps - 3:
                raise ValueError(f"es={es} out of range for ps={self.ps}")

    @classmethod
    def fixed(cls, ps: int, es: int) -> "PositConfig":
        return cls(ps, EsMode.fixed(es))

    @classmethod
    def dual(cls, es: int = 2) -> "PositConfig":
        return cls(32, EsMode.dual(es))

    @property
    def es(self) -> int:
        return self.es_mode.es

    @property
    def fs(self) -> int:
        """Maximum fraction size (hidden bit excluded)."""
        return self.ps - self.es - 3

    @property
    def max_exp(self) -> int:
        return (self.ps - 2) << self.es

    def with_es(self, es: int) -> "PositConfig":
        return PositConfig(self.ps, self.es_mode.with_es(es))


@dataclass(frozen=True)
class DecodedPosit:
    """Unpacked posit: sign, combined exponent, significand with hidden bit.

    ``sig`` has fs+1 bits with the top bit set whenever the value is numeric;
    for zero/NaR the numeric fields are meaningless and must be ignored.
    """

    sign: int
    exp: int
    sig: int
    is_zero: bool = False
    is_nar: bool = False


@dataclass(frozen=True)
class Unrounded:
    """Wide unrounded result handed to the encoder.

    The true magnitude is ``(sig + tail) * 2**(exp - width + 1)`` with
    ``0 <= tail < 1`` and ``tail > 0`` iff ``sticky`` is set; ``sig`` is
    normalized (bit width-1 set). ``flags`` carries exception bits (only DZ)
    through to the encoder output untouched.
    """

    sign: int
    exp: int
    sig: int
    width: int
    sticky: int = 0
    is_zero: bool = False
    is_nar: bool = False
    flags: int = 0


def nar_pattern(ps: int) -> int:
    return 1 << (ps - 1)


def maxpos_pattern(ps: int) -> int:
    return (1 << (ps - 1)) - 1


def minpos_pattern(ps: int) -> int:
    return 1


def is_zero(word: int) -> bool:
    return word == 0


def is_nar(word: int, ps: int) -> bool:
    return word == 1 << (ps - 1)


def negate(word: int, ps: int) -> int:
    """Two's complement of the pattern; zero and NaR are fixed points."""
    return (-word) & ((1 << ps) - 1)


def sword(word: int, ps: int) -> int:
    """Pattern reinterpreted as a signed integer (posit ordering key)."""
    return word - (1 << ps) if word & (1 << (ps - 1)) else word


def decode_bits(word: int, ps: int, es: int):
    """Unpack a posit word into (sign, exp, sig, is_zero, is_nar).

    Negative words are two's-complemented before field extraction. The
    significand comes back left-aligned in fs+1 bits (hidden bit on top);
    exponent bits cut off by a long regime read as zero.
    """
    if word == 0:
        return (0, 0, 0, True, False)
    half = 1 << (ps - 1)
    if word == half:
        return (0, 0, 0, False, True)
    sign = 1 if word & half else 0
    mag = (-word) & ((1 << ps) - 1) if sign else word

    nbody = ps - 1
    body = mag & (half - 1)
    # regime: run of identical bits after the sign, terminated by the
    # opposite bit or the end of the word
    if (body >> (nbody - 1)) & 1:
        run = nbody - ((~body & (half - 1)).bit_length())
        k = run - 1
    else:
        run = nbody - body.bit_length()
        k = -run

    fs = ps - es - 3
    tail_len = nbody - run - 1
    if tail_len <= 0:
        e = 0
        frac = 0
    else:
        tail = body & ((1 << tail_len) - 1)
        if tail_len >= es:
            e = tail >> (tail_len - es) if es else 0
            fr_len = tail_len - es
            frac = (tail & ((1 << fr_len) - 1)) << (fs - fr_len)
        else:
            e = tail << (es - tail_len)
            frac = 0
    return (sign, (k << es) + e, (1 << fs) | frac, False, False)


def encode_bits(sign: int, exp: int, sig: int, width: int, sticky: int,
                ps: int, es: int) -> int:
    """Round an unrounded magnitude into a posit word (nearest, ties to even).

    Saturates at maxpos for magnitudes at or beyond it and returns minpos for
    any nonzero magnitude below it ("never round to zero"). When the regime
    truncates the exponent field, neighbouring posits are a full power-of-two
    step apart and the nearest one is decided against the arithmetic midpoint
    rather than by bit truncation.

    Callers must supply ``sig`` normalized (bit width-1 set) and, whenever
    ``sticky`` is set, at least ``min_sig_width`` wide so that the tail can
    never straddle a rounding boundary.
    """
    maxpos = (1 << (ps - 1)) - 1
    k = exp >> es
    if k >= ps - 2:
        mag = maxpos
    elif k <= -(ps - 1):
        mag = 1
    else:
        run_len = k + 2 if k >= 0 else 1 - k
        rem = ps - 1 - run_len
        run = (((1 << (k + 1)) - 1) << 1) if k >= 0 else 1
        eb = exp & ((1 << es) - 1)
        if rem >= es:
            body = ((run << es | eb) << (width - 1)) | (sig & ((1 << (width - 1)) - 1))
            blen = run_len + es + width - 1
            if blen <= ps - 1:
                assert not sticky, "sticky requires full-width significand"
                mag = body << (ps - 1 - blen)
            else:
                drop = blen - (ps - 1)
                mag = body >> drop
                rb = (body >> (drop - 1)) & 1
                if rb and (sticky or body & ((1 << (drop - 1)) - 1) or mag & 1):
                    mag += 1
        else:
            # e field cut short: only its top `rem` bits are stored, so the
            # bracketing posits are 2**gap exponent steps apart
            gap = es - rem
            mag = (run << rem) | (eb >> gap)
            delta = eb & ((1 << gap) - 1)
            step = 1 << gap
            lhs = sig << (delta + 1)
            rhs = ((1 << step) + 1) << (width - 1)
            if lhs > rhs or (lhs == rhs and sticky):
                mag += 1
            elif lhs == rhs:
                mag += mag & 1
            elif sticky:
                # a sub-ulp tail must not be able to reach the midpoint
                assert rhs - lhs >= 1 << (delta + 1), \
                    "significand too narrow for taper rounding"
    return ((-mag) & ((1 << ps) - 1)) if sign else mag


def min_sig_width(ps: int, es: int) -> int:
    """Narrowest inexact significand the encoder can round correctly.

    fs+2 covers the finest fraction plus its round bit; 2**es+1 ensures the
    midpoints between regime-truncated neighbours (a full power-of-two step
    apart) stay resolvable.
    """
    return max(ps - es - 1, (1 << es) + 1)


def decode(word: int, cfg: PositConfig) -> DecodedPosit:
    sign, exp, sig, f0, fnar = decode_bits(word, cfg.ps, cfg.es)
    return DecodedPosit(sign, exp, sig, f0, fnar)


def encode(u: Unrounded, cfg: PositConfig) -> tuple[int, int]:
    """Encode an unrounded result; returns (word, exception flags)."""
    if u.is_nar:
        return nar_pattern(cfg.ps), u.flags
    if u.is_zero:
        return 0, u.flags
    word = encode_bits(u.sign, u.exp, u.sig, u.width, u.sticky, cfg.ps, cfg.es)
    return word, u.flags


def lift(d: DecodedPosit, cfg: PositConfig) -> Unrounded:
    """Exact widening of a decoded posit for re-encoding (sticky clear)."""
    return Unrounded(d.sign, d.exp, d.sig, cfg.fs + 1, 0, d.is_zero, d.is_nar)
