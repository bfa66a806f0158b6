"""Simulator behaviour: RV32I semantics, posit dispatch, traps, cycles."""

import struct

import pytest

from posit_rv32.asm import Assembler
from posit_rv32.core import PositConfig
from posit_rv32.isa import CSR_FRM, CSR_PCSR
from posit_rv32.sim import (
    MMIO_PUTCHAR,
    CycleModel,
    OffloadTransaction,
    PositCoprocessor,
    SimConfig,
    Simulator,
    load_image,
    parse_elf32,
    parse_report,
)

MEM = 1 << 20  # tests do not need the 64 MiB default


def make_sim(mode="tight", **kw):
    return Simulator(SimConfig(mode=mode, mem_size=MEM, **kw))


def run_asm(build, mode="tight", fuel=100000, **kw):
    a = Assembler()
    build(a)
    sim = make_sim(mode, **kw)
    load_image(sim, a.assemble(), base=a.base)
    return sim, sim.run(fuel=fuel)


P15 = 0x44000000  # 1.5 at es=2
P12 = 0x4199999A  # ~1.2 at es=2


def test_exit_convention_and_minimal_cycles():
    def prog(a):
        a.li("a7", 93)
        a.li("a0", 7)
        a.ecall()

    _, r = run_asm(prog)
    assert r.status == "ok" and r.exit_code == 7
    assert r.instructions == 5 and r.cycles == 5


def test_immediate_ecall_costs_one_cycle():
    a = Assembler()
    a.ecall()  # a7 == 0 is not the exit call
    sim = make_sim()
    load_image(sim, a.assemble())
    r = sim.run()
    assert r.status == "trap" and r.trap_cause == "ecall"

    # a program that is nothing but the exit ECALL retires one instruction
    sim = make_sim()
    load_image(sim, a.assemble())
    sim.state.x[17] = 93
    r = sim.run()
    assert (r.status, r.exit_code) == ("ok", 0)
    assert r.cycles == 1 and r.instructions == 1


def test_basic_integer_loop():
    def prog(a):
        a.li("t0", 0)
        a.li("t1", 10)
        a.label("loop")
        a.addi("t0", "t0", 3)
        a.addi("t1", "t1", -1)
        a.bne("t1", "zero", "loop")
        a.mv("a0", "t0")
        a.li("a7", 93)
        a.ecall()

    _, r = run_asm(prog)
    assert r.exit_code == 30


def test_memory_and_mmio():
    def prog(a):
        a.li("t0", 0x2000)
        a.li("t1", 0xDEADBEEF)
        a.sw("t1", "t0", 0)
        a.lw("t2", "t0", 0)
        a.lbu("t3", "t0", 3)
        a.li("t4", MMIO_PUTCHAR)
        a.li("t5", ord("H"))
        a.sb("t5", "t4", 0)
        a.li("t5", ord("i"))
        a.sb("t5", "t4", 0)
        a.mv("a0", "t3")
        a.li("a7", 93)
        a.ecall()

    sim, r = run_asm(prog)
    assert r.exit_code == 0xDE
    assert r.stdout == b"Hi"
    assert sim.load(0x2000, 4) == 0xDEADBEEF


def test_x0_immutable():
    def prog(a):
        a.li("t0", 99)
        a.addi("x0", "t0", 1)
        a.add("x0", "t0", "t0")
        a.mv("a0", "x0")
        a.li("a7", 93)
        a.ecall()

    _, r = run_asm(prog)
    assert r.exit_code == 0 and r.x[0] == 0


@pytest.mark.parametrize("word,cause", [
    (0x00000000, "illegal-instruction"),
    (0xFFFFFFFF, "illegal-instruction"),
])
def test_illegal_words_trap(word, cause):
    sim = make_sim()
    load_image(sim, struct.pack("<I", word))
    r = sim.run()
    assert r.status == "trap" and r.trap_cause == cause


def test_misaligned_and_oob_traps():
    def prog(a):
        a.li("t0", 0x2001)
        a.lw("t1", "t0", 0)

    _, r = run_asm(prog)
    assert r.trap_cause == "misaligned-load"

    def prog2(a):
        a.li("t0", MEM + 4096)
        a.sw("t0", "t0", 0)

    _, r = run_asm(prog2)
    assert r.trap_cause == "store-access"

    def prog3(a):
        a.li("t0", 0x2002)
        a.jalr("x0", "t0", 0)

    _, r = run_asm(prog3)
    assert r.trap_cause == "misaligned-fetch"


def test_fuel_exhaustion_distinct_from_trap():
    def prog(a):
        a.label("spin")
        a.j("spin")

    _, r = run_asm(prog, fuel=50)
    assert r.status == "fuel-exhausted"
    assert r.instructions == 50


@pytest.mark.parametrize("mode", ["tight", "coproc"])
def test_posit_add_through_sim(mode):
    def prog(a):
        a.la("t0", "data")
        a.flw("p1", "t0", 0)
        a.flw("p2", "t0", 4)
        a.fadd_s("p3", "p1", "p2")
        a.fsw("p3", "t0", 8)
        a.halt()
        a.label("data")
        a.word(P15)
        a.word(P12)
        a.word(0)

    sim, r = run_asm(prog, mode=mode)
    from posit_rv32 import arith
    want = arith.add(P15, P12, PositConfig.dual(2))
    assert r.status == "ok"
    assert r.p[3] == want
    # the stored copy reaches memory identically in both modes
    assert sim.load(r.x[5] + 8, 4) == want


def test_fadd_latency_charged():
    def prog(a):
        a.fadd_s("p3", "p1", "p2")
        a.halt()

    _, r = run_asm(prog)
    # fadd(6) + halt prologue 2x li(1 each = 4 instr... li is 2 instrs) + ecall
    assert r.cycles == 6 + 4 + 1


def test_div_by_zero_sets_dz_and_nar():
    def prog(a):
        a.la("t0", "data")
        a.flw("p1", "t0", 0)
        a.fdiv_s("p2", "p1", "p0")  # p0 holds zero
        a.halt()
        a.label("data")
        a.word(P15)

    _, r = run_asm(prog)
    assert r.p[2] == 0x80000000
    assert r.fflags == 1 << 3
    assert r.cycles > 20


def test_es_mode_switch_changes_decoding():
    # 0x44000000 is 1.5 at es=2 but 2.0 at es=3; squaring under each mode
    def prog(a):
        a.la("t0", "data")
        a.flw("p1", "t0", 0)
        a.fmul_s("p2", "p1", "p1")
        a.li("t1", 3 << 8)  # es-mode field sits above the 5-bit uimm reach
        a.csrrw("x0", CSR_PCSR, "t1")
        a.fmul_s("p3", "p1", "p1")
        a.halt()
        a.label("data")
        a.word(P15)

    _, r = run_asm(prog)
    from posit_rv32 import arith
    assert r.p[2] == arith.mul(P15, P15, PositConfig.fixed(32, 2))
    assert r.p[3] == arith.mul(P15, P15, PositConfig.fixed(32, 3))
    assert r.es_mode == 3


def test_frm_reads_zero_after_writes():
    def prog(a):
        a.li("t0", 0b111)
        a.csrrw("x0", CSR_FRM, "t0")
        a.csrrs("a0", CSR_FRM, "x0")
        a.li("a7", 93)
        a.ecall()

    _, r = run_asm(prog)
    assert r.exit_code == 0


def test_fcvt_es_in_place():
    def prog(a):
        a.la("t0", "data")
        a.flw("p5", "t0", 0)
        a.fcvt_es("p5", 2, 3)
        a.halt()
        a.label("data")
        a.word(P15)

    _, r = run_asm(prog)
    assert r.p[5] == 0x42000000


def test_rtz_vs_rne_conversion():
    def prog(a):
        a.la("t0", "data")
        a.flw("p1", "t0", 0)
        a.fcvt_w_s("a1", "p1", rm=0)
        a.fcvt_w_s("a2", "p1", rm=1)
        a.halt()
        a.label("data")
        a.word(P15)

    _, r = run_asm(prog)
    assert r.x[11] == 2  # nearest-even
    assert r.x[12] == 1  # toward zero


def test_offload_transactions_direct():
    cp = PositCoprocessor(PositConfig.dual(2))
    cp.p[1] = P15
    cp.p[2] = P12
    from posit_rv32.isa import Instr, encode_instr
    word = encode_instr(Instr("FADD.S", rd=3, rs1=1, rs2=2))
    resp = cp.execute(OffloadTransaction(word=word, es=2))
    assert resp.value is None and resp.fflags == 0
    from posit_rv32 import arith
    assert cp.p[3] == arith.add(P15, P12, PositConfig.dual(2))
    # xd-style traffic returns a value
    word = encode_instr(Instr("FMV.X.W", rd=7, rs1=3))
    resp = cp.execute(OffloadTransaction(word=word, es=2, expects_response=True))
    assert resp.value == cp.p[3]


def test_mode_equivalence_on_mixed_program():
    def prog(a):
        a.la("t0", "data")
        a.flw("p1", "t0", 0)
        a.flw("p2", "t0", 4)
        a.fmadd_s("p3", "p1", "p2", "p2")
        a.fdiv_s("p4", "p3", "p1")
        a.fsqrt_s("p5", "p4")
        a.fcvt_w_s("t1", "p5")
        a.fcvt_s_w("p6", "t1")
        a.feq_s("t2", "p6", "p5")
        a.fsgnjn_s("p7", "p5", "p5")
        a.fmin_s("p8", "p7", "p5")
        a.fclass_s("t3", "p7")
        a.fcvt_es("p5", 2, 3)
        a.fmv_x_w("t4", "p3")
        a.fmv_w_x("p9", "t4")
        a.fsw("p8", "t0", 8)
        a.halt()
        a.label("data")
        a.word(P15)
        a.word(P12)
        a.word(0)

    sim_t, rt = run_asm(prog, mode="tight")
    sim_c, rc = run_asm(prog, mode="coproc")
    assert rt.p == rc.p
    assert rt.x == rc.x
    assert rt.fflags == rc.fflags
    assert rt.cycles == rc.cycles  # overhead defaults to zero
    assert sim_t.state.mem == sim_c.state.mem


def test_offload_overhead_cycles():
    def prog(a):
        a.fadd_s("p3", "p1", "p2")
        a.halt()

    _, r0 = run_asm(prog, mode="coproc")
    _, r2 = run_asm(prog, mode="coproc", offload_overhead=2)
    assert r2.cycles == r0.cycles + 2


def test_determinism():
    def prog(a):
        a.la("t0", "data")
        a.flw("p1", "t0", 0)
        a.fsqrt_s("p2", "p1")
        a.halt()
        a.label("data")
        a.word(P12)

    _, r1 = run_asm(prog)
    _, r2 = run_asm(prog)
    assert r1 == r2


def test_report_round_trip():
    def prog(a):
        a.halt(code=5)

    _, r = run_asm(prog)
    d = parse_report(r.to_text())
    assert d["status"] == "ok"
    assert d["exit_code"] == "5"
    assert d["x10"] == "0x00000005"
    assert "p31" in d


def test_trace_lines():
    def prog(a):
        a.li("t0", 1)
        a.fadd_s("p3", "p1", "p2")
        a.halt()

    a = Assembler()
    prog(a)
    sim = make_sim()
    lines = []
    sim.trace_sink = lines.append
    load_image(sim, a.assemble())
    sim.run()
    assert any("FADD.S p3, p1, p2" in ln and "raw=0x" in ln for ln in lines)
    cycle, pc, raw = lines[0].split()[:3]
    assert pc.startswith("0x") and raw.startswith("0x")


def test_cycle_model_override():
    def prog(a):
        a.fadd_s("p3", "p1", "p2")
        a.halt()

    cm = CycleModel(latency={"FADD.S": 99})
    _, r = run_asm(prog, cycle_model=cm)
    assert r.cycles == 99 + 5


# ── ELF loading ─────────────────────────────────────────────────────


def make_elf(segments, entry):
    """Build a minimal ELF32 little-endian image."""
    phnum = len(segments)
    ehsize, phentsize = 52, 32
    payload_off = ehsize + phentsize * phnum
    blobs = b""
    phdrs = b""
    for vaddr, data in segments:
        phdrs += struct.pack("<8I", 1, payload_off + len(blobs), vaddr, vaddr,
                             len(data), len(data) + 16, 7, 4)
        blobs += data
    ehdr = b"\x7fELF" + bytes([1, 1, 1, 0]) + b"\x00" * 8
    ehdr += struct.pack("<HHIIIIIHHHHHH", 2, 243, 1, entry, ehsize, 0, 0,
                        ehsize, phentsize, phnum, 0, 0, 0)
    return ehdr + phdrs + blobs


def test_elf_loader():
    a = Assembler(base=0x4000)
    a.li("a0", 42)
    a.li("a7", 93)
    a.ecall()
    code = a.assemble()
    elf = make_elf([(0x4000, code), (0x8000, b"\x01\x02\x03\x04")], entry=0x4000)
    entry, segs = parse_elf32(elf)
    assert entry == 0x4000 and len(segs) == 2
    assert segs[1][1][:4] == b"\x01\x02\x03\x04"
    assert len(segs[1][1]) == 4 + 16  # memsz padding

    sim = make_sim()
    assert load_image(sim, elf) == 0x4000
    r = sim.run()
    assert r.exit_code == 42
    assert sim.load(0x8000, 4) == 0x04030201


def test_flat_image_with_entry_override():
    a = Assembler(base=0x1000)
    a.halt(code=9)
    sim = make_sim()
    load_image(sim, a.assemble(), base=0x1000, entry=0x1000)
    assert sim.run().exit_code == 9
