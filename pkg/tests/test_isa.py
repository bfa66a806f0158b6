"""Instruction encode/decode round trips, decode coverage, pcsr semantics."""

import random

import pytest

from posit_rv32.core import EsMode
from posit_rv32.isa import (
    CSR_FFLAGS,
    CSR_FRM,
    CSR_PCSR,
    FCVT_ES_FUNCT7,
    ILLEGAL,
    Instr,
    Pcsr,
    decode_instr,
    disasm,
    encode_instr,
    pcsr_access,
)

F_TABLE = [
    "FMADD.S", "FMSUB.S", "FNMSUB.S", "FNMADD.S", "FADD.S", "FSUB.S",
    "FMUL.S", "FDIV.S", "FSQRT.S", "FSGNJ.S", "FSGNJN.S", "FSGNJX.S",
    "FMIN.S", "FMAX.S", "FEQ.S", "FLT.S", "FLE.S", "FCVT.W.S", "FCVT.WU.S",
    "FCVT.S.W", "FCVT.S.WU", "FMV.X.W", "FMV.W.X", "FCLASS.S",
]


R4_OPS = ("FMADD.S", "FMSUB.S", "FNMSUB.S", "FNMADD.S")
RM_OPS = R4_OPS + ("FADD.S", "FSUB.S", "FMUL.S", "FDIV.S", "FSQRT.S",
                   "FCVT.S.W", "FCVT.S.WU")
ONE_SRC = ("FSQRT.S", "FCVT.W.S", "FCVT.WU.S", "FCVT.S.W", "FCVT.S.WU",
           "FMV.X.W", "FMV.W.X", "FCLASS.S")


def sample_instrs():
    rng = random.Random(1)
    out = []
    for m in F_TABLE:
        rm = rng.choice([0, 1]) if m in ("FCVT.W.S", "FCVT.WU.S") else (
            rng.randrange(8) if m in RM_OPS else 0)
        out.append(Instr(
            m, rd=rng.randrange(32), rs1=rng.randrange(32),
            rs2=0 if m in ONE_SRC else rng.randrange(32),
            rs3=rng.randrange(32) if m in R4_OPS else 0, rm=rm))
    out += [
        Instr("LUI", rd=5, imm=0x12345000),
        Instr("AUIPC", rd=6, imm=0xFFFFF000),
        Instr("JAL", rd=1, imm=-2048),
        Instr("JALR", rd=1, rs1=2, imm=16),
        Instr("BEQ", rs1=1, rs2=2, imm=-64),
        Instr("BGEU", rs1=3, rs2=4, imm=4094),
        Instr("LW", rd=7, rs1=8, imm=-4),
        Instr("LBU", rd=7, rs1=8, imm=9),
        Instr("SW", rs1=8, rs2=7, imm=-4),
        Instr("SB", rs1=8, rs2=7, imm=100),
        Instr("ADDI", rd=1, rs1=0, imm=93),
        Instr("SLTIU", rd=1, rs1=2, imm=1),
        Instr("SLLI", rd=1, rs1=2, imm=31),
        Instr("SRAI", rd=1, rs1=2, imm=4),
        Instr("ADD", rd=1, rs1=2, rs2=3),
        Instr("SUB", rd=1, rs1=2, rs2=3),
        Instr("SRA", rd=1, rs1=2, rs2=3),
        Instr("AND", rd=1, rs1=2, rs2=3),
        Instr("FENCE"),
        Instr("ECALL"),
        Instr("EBREAK"),
        Instr("CSRRW", rd=1, rs1=2, csr=CSR_PCSR),
        Instr("CSRRSI", rd=1, rs1=8, csr=CSR_FFLAGS),
        Instr("FLW", rd=3, rs1=2, imm=8),
        Instr("FSW", rs1=2, rs2=3, imm=12),
        Instr("FCVT.ES", rd=5, rs1=2, rs2=3),
    ]
    return out


def test_round_trip_all_mnemonics():
    for i in sample_instrs():
        word = encode_instr(i)
        back = decode_instr(word)
        # field-exact round trip; raw just echoes the encoding
        assert (back.mnemonic, back.rd, back.rs1, back.rs2, back.rs3,
                back.imm, back.rm, back.csr, back.raw) == (
            i.mnemonic, i.rd, i.rs1, i.rs2, i.rs3, i.imm, i.rm, i.csr, word)


def test_decode_encode_identity_on_random_valid_words():
    rng = random.Random(2)
    hits = 0
    for _ in range(30000):
        w = rng.getrandbits(32)
        d = decode_instr(w)
        if d.mnemonic == ILLEGAL:
            continue
        hits += 1
        assert encode_instr(d) == w, f"{d} from {w:#010x}"
    assert hits > 1000


def test_every_f_mnemonic_has_one_decode_arm():
    seen = {}
    for i in sample_instrs():
        d = decode_instr(encode_instr(i))
        seen.setdefault(d.mnemonic, 0)
        seen[d.mnemonic] += 1
    for m in F_TABLE + ["FCVT.ES"]:
        assert seen.get(m, 0) >= 1, f"missing decode arm for {m}"


def test_rm_field_tolerated_on_compute_ignored_elsewhere():
    # FADD.S with rm=111 still decodes as FADD.S
    w = encode_instr(Instr("FADD.S", rd=1, rs1=2, rs2=3, rm=7))
    assert decode_instr(w).mnemonic == "FADD.S"
    # posit-to-int conversions accept only RNE/RTZ
    w = encode_instr(Instr("FCVT.W.S", rd=1, rs1=2, rm=1))
    assert decode_instr(w).mnemonic == "FCVT.W.S"
    bad = w | (0x7 << 12)
    assert decode_instr(bad).mnemonic == ILLEGAL
    with pytest.raises(ValueError):
        encode_instr(Instr("FCVT.W.S", rd=1, rs1=2, rm=4))


def test_illegal_words():
    assert decode_instr(0x00000000).mnemonic == ILLEGAL
    assert decode_instr(0xFFFFFFFF).mnemonic == ILLEGAL
    # custom-0 word with unknown funct7 is reserved
    w = (0b0000001 << 25) | 0b0001011
    assert decode_instr(w).mnemonic == ILLEGAL
    # FCVT.ES with es out of range
    w = (FCVT_ES_FUNCT7 << 25) | (4 << 20) | (2 << 15) | (5 << 7) | 0b0001011
    assert decode_instr(w).mnemonic == ILLEGAL


def test_fcvt_es_word_layout():
    w = encode_instr(Instr("FCVT.ES", rd=9, rs1=2, rs2=3))
    assert (w >> 25) == FCVT_ES_FUNCT7
    assert (w >> 20) & 0x1F == 3  # to-es
    assert (w >> 15) & 0x1F == 2  # from-es
    assert (w >> 12) & 0x7 == 0
    assert (w >> 7) & 0x1F == 9
    assert w & 0x7F == 0b0001011
    # configurable custom opcode
    w2 = encode_instr(Instr("FCVT.ES", rd=9, rs1=2, rs2=3), custom_opcode=0b0101011)
    assert w2 & 0x7F == 0b0101011
    assert decode_instr(w2, custom_opcode=0b0101011).mnemonic == "FCVT.ES"
    assert decode_instr(w2).mnemonic == ILLEGAL


def test_disasm_format():
    w = encode_instr(Instr("FMADD.S", rd=3, rs1=1, rs2=2, rs3=7))
    s = disasm(w)
    assert s == f"FMADD.S p3, p1, p2, p7 # raw={w:#010x}"
    w = encode_instr(Instr("FCVT.W.S", rd=3, rs1=1, rm=1))
    assert disasm(w).startswith("FCVT.W.S x3, p1")
    w = encode_instr(Instr("FLW", rd=3, rs1=2, imm=8))
    assert disasm(w).startswith("FLW p3, 8(x2)")
    assert "raw=0x" in disasm(0x00000013)


# ── pcsr ────────────────────────────────────────────────────────────


def make_pcsr(dual=True):
    return Pcsr(EsMode.dual(2) if dual else EsMode.fixed(2))


def test_pcsr_es_mode_write_and_probe():
    p = make_pcsr()
    old = pcsr_access(p, CSR_PCSR, "rw", 3 << 8)
    assert old == 2 << 8
    assert p.es_mode.es == 3
    # illegal es value leaves the field unchanged (probe-and-find)
    pcsr_access(p, CSR_PCSR, "rw", 7 << 8)
    assert p.es_mode.es == 3
    p2 = make_pcsr(dual=False)
    pcsr_access(p2, CSR_PCSR, "rw", 3 << 8)
    assert p2.es_mode.es == 2


def test_pcsr_rm_tied_to_zero():
    p = make_pcsr()
    pcsr_access(p, CSR_PCSR, "rw", 0b010 << 5)
    assert pcsr_access(p, CSR_FRM, "rs", 0) == 0
    assert pcsr_access(p, CSR_PCSR, "rs", 0) & (0x7 << 5) == 0
    pcsr_access(p, CSR_FRM, "rw", 0b111)
    assert pcsr_access(p, CSR_FRM, "rs", 0) == 0


def test_pcsr_dz_sticky_and_clearable():
    p = make_pcsr()
    p.dz = True
    assert pcsr_access(p, CSR_FFLAGS, "rs", 0) == 1 << 3
    assert pcsr_access(p, CSR_PCSR, "rs", 0) & 0x1F == 1 << 3
    # only the DZ bit of fflags is writable
    pcsr_access(p, CSR_FFLAGS, "rw", 0x1F)
    assert p.fflags == 1 << 3
    pcsr_access(p, CSR_FFLAGS, "rc", 1 << 3)
    assert p.fflags == 0


def test_pcsr_illegal_address():
    p = make_pcsr()
    with pytest.raises(KeyError):
        pcsr_access(p, 0x300, "rs", 0)
