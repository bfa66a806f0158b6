"""Oracle self-validation: exact values and rounding against brute force.

The oracle is the arbiter for every arithmetic test in the suite, so it gets
validated first and independently: at ps=8 (both es values) the whole value
lattice is enumerated and nearest-posit rounding is recomputed by linear
scan over that table.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posit_rv32 import oracle
from posit_rv32.oracle import NAR, ZERO, exact_value, round_to_posit


def value_table(ps, es):
    """All non-NaR words sorted by value (signed-pattern order)."""
    words = sorted(range(1 << ps), key=lambda w: w - (1 << ps) if w >= 1 << (ps - 1) else w)
    words.remove(1 << (ps - 1))
    return [(w, exact_value(w, ps, es)) for w in words]


def nearest_by_scan(x, table, ps):
    """Reference rounding: scan every representable, break ties to even."""
    if x == 0:
        return 0
    minpos_v = table[len(table) // 2]  # first entry above zero.. recomputed below
    vals = [v for _, v in table]
    # saturation / never-round-to-zero rules
    pos = [(w, v) for w, v in table if v > 0]
    if x > 0:
        if x >= pos[-1][1]:
            return pos[-1][0]
        if x <= pos[0][1]:
            return pos[0][0]
    else:
        neg = [(w, v) for w, v in table if v < 0]
        if x <= neg[0][1]:
            return neg[0][0]
        if x >= neg[-1][1]:
            return neg[-1][0]
    best = None
    best_d = None
    for w, v in table:
        d = abs(v - x)
        if best_d is None or d < best_d:
            best, best_d = w, d
        elif d == best_d and w & 1 == 0:
            best = w
    return best


@pytest.mark.parametrize("es", [2, 3])
def test_exact_value_monotone_ps8(es):
    table = value_table(8, es)
    for (w0, v0), (w1, v1) in zip(table, table[1:]):
        assert v0 < v1, f"order break at {w0:#x}/{w1:#x}"


@pytest.mark.parametrize("es", [2, 3])
def test_round_idempotent_on_representables_ps8(es):
    for w, v in value_table(8, es):
        assert round_to_posit(v, 8, es) == w


@pytest.mark.parametrize("es", [0, 1, 2])
def test_round_idempotent_on_representables_ps16(es):
    for w in range(1 << 16):
        if w == 1 << 15:
            continue
        v = exact_value(w, 16, es)
        assert round_to_posit(v, 16, es) == w


@pytest.mark.parametrize("es", [2, 3])
def test_round_matches_scan_at_midpoints_ps8(es):
    table = value_table(8, es)
    eps = Fraction(1, 1 << 40)
    for (w0, v0), (w1, v1) in zip(table, table[1:]):
        mid = (v0 + v1) / 2
        for x in (mid, mid - eps, mid + eps):
            want = nearest_by_scan(x, table, 8)
            got = round_to_posit(x, 8, es)
            assert got == want, (
                f"es={es} x between {w0:#04x} and {w1:#04x}: got {got:#04x} want {want:#04x}"
            )


@pytest.mark.parametrize("es", [2, 3])
def test_round_random_rationals_match_scan_ps8(es):
    import random

    rng = random.Random(1234 + es)
    table = value_table(8, es)
    for _ in range(4000):
        x = Fraction(rng.randint(-(1 << 40), 1 << 40), rng.randint(1, 1 << 40))
        # scale into an interesting magnitude now and then
        x *= Fraction(1 << rng.randint(0, 60), 1 << rng.randint(0, 60))
        assert round_to_posit(x, 8, es) == nearest_by_scan(x, table, 8)


def test_saturation_and_minpos_rules():
    assert round_to_posit(Fraction(2) ** 300, 32, 2) == 0x7FFFFFFF
    assert round_to_posit(-(Fraction(2) ** 300), 32, 2) == 0x80000001
    assert round_to_posit(Fraction(1, 2**300), 32, 2) == 0x00000001
    assert round_to_posit(Fraction(-1, 2**300), 32, 2) == 0xFFFFFFFF
    assert round_to_posit(ZERO, 32, 2) == 0
    assert round_to_posit(NAR, 32, 2) == 0x80000000


def test_golden_values_from_format_definition():
    # 0x44000000 is the es=2 encoding of 1.5; same word reads 2.0 under es=3
    assert exact_value(0x44000000, 32, 2) == Fraction(3, 2)
    assert exact_value(0x44000000, 32, 3) == 2
    assert exact_value(0x40000000, 32, 2) == 1
    assert exact_value(0x80000000, 32, 2) is NAR
    assert exact_value(0, 32, 2) is ZERO
    assert round_to_posit(Fraction(3, 2), 32, 2) == 0x44000000
    # 1.2 is not dyadic; its nearest es=2 posit is the documented pattern
    assert round_to_posit(Fraction(6, 5), 32, 2) == 0x4199999A


def test_extreme_patterns_es2():
    assert exact_value(0x7FFFFFFF, 32, 2) == Fraction(2) ** 120
    assert exact_value(0x00000001, 32, 2) == Fraction(1, 2**120)
    assert exact_value(0x80000001, 32, 2) == -(Fraction(2) ** 120)


def test_wide_value_example_es3():
    # 3.0E+40 rounds to 1411 * 2^124 at es=3
    w = round_to_posit(Fraction(30) * 10**39, 32, 3)
    assert exact_value(w, 32, 3) == 1411 * Fraction(2) ** 124
    assert float(exact_value(w, 32, 3)) == 3.000865123284026e40


def test_max_precision_example_es2():
    # a 28-bit significand value held exactly at es=2
    x = Fraction(268369921, 1 << 24)
    w = round_to_posit(x, 32, 2)
    assert exact_value(w, 32, 2) == x


@pytest.mark.parametrize("es", [2, 3])
def test_ordering_matches_signed_patterns_ps16(es):
    import random

    rng = random.Random(99)
    for _ in range(2000):
        a, b = rng.getrandbits(16), rng.getrandbits(16)
        if a == 1 << 15 or b == 1 << 15:
            continue
        sa = a - (1 << 16) if a >= 1 << 15 else a
        sb = b - (1 << 16) if b >= 1 << 15 else b
        assert (exact_value(a, 16, es) < exact_value(b, 16, es)) == (sa < sb)


def test_oracle_ops_basics():
    a, b = Fraction(3, 2), Fraction(6, 5)
    assert oracle.oracle_add(a, b) == Fraction(27, 10)
    assert oracle.oracle_div(Fraction(1), ZERO) is NAR
    assert oracle.oracle_div(ZERO, Fraction(2)) is ZERO
    assert oracle.oracle_add(NAR, a) is NAR
    assert oracle.oracle_fma(a, b, Fraction(1), True, True) == -a * b - 1
    assert oracle.oracle_fma(a, b, Fraction(1), True, False) == -a * b + 1


def test_oracle_sqrt_exact_and_irrational():
    r = oracle.oracle_sqrt(Fraction(9, 4))
    assert r.exact == Fraction(3, 2)
    assert r.round(32, 2) == round_to_posit(Fraction(3, 2), 32, 2)
    r2 = oracle.oracle_sqrt(Fraction(2))
    w = r2.round(32, 2)
    # sqrt(2) must lie strictly inside the rounding interval of the result:
    # the midpoints with both neighbours must square to straddle 2
    v = exact_value(w, 32, 2)
    lo_mid = (exact_value(w - 1, 32, 2) + v) / 2
    hi_mid = (v + exact_value(w + 1, 32, 2)) / 2
    assert lo_mid * lo_mid < 2 < hi_mid * hi_mid
    assert oracle.oracle_sqrt(Fraction(-1)).exact is NAR
    # tiny radicand exercises deep bracket refinement
    tiny = Fraction(1, 2 ** 220)
    wt = oracle.oracle_sqrt(tiny).round(32, 2)
    assert exact_value(wt, 32, 2) == Fraction(1, 2 ** 110)


def test_oracle_to_int():
    assert oracle.oracle_to_int(Fraction(3, 2), 32, False, False) == 2
    assert oracle.oracle_to_int(Fraction(3, 2), 32, False, True) == 1
    assert oracle.oracle_to_int(Fraction(5, 2), 32, False, False) == 2
    assert oracle.oracle_to_int(Fraction(-3, 2), 32, False, False) == (-2) & 0xFFFFFFFF
    assert oracle.oracle_to_int(Fraction(-3, 2), 32, True, False) == 0
    assert oracle.oracle_to_int(Fraction(2) ** 120, 32, False, False) == 0x7FFFFFFF
    assert oracle.oracle_to_int(-(Fraction(2) ** 120), 32, False, False) == 0x80000000
    assert oracle.oracle_to_int(Fraction(2) ** 120, 32, True, False) == 0xFFFFFFFF
    assert oracle.oracle_to_int(NAR, 32, False, False) == 0x80000000


def test_batch_interface():
    lines = [
        "add 0x44000000 0x4199999A 0x00000000 2",
        "sqrt 0x40000000 - - 2",
        "div 0x40000000 0x00000000 - 2",
    ]
    out = oracle.batch_eval(lines)
    assert out[0] == f"0x{round_to_posit(Fraction(27, 10), 32, 2):08X}"
    assert out[1] == "0x40000000"
    assert out[2] == "0x80000000"


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=0, max_value=(1 << 32) - 1), st.sampled_from([2, 3]))
def test_round_trip_idempotent_ps32(w, es):
    v = exact_value(w, 32, es)
    if v is NAR:
        assert round_to_posit(v, 32, es) == 0x80000000
    else:
        assert round_to_posit(v, 32, es) == w
