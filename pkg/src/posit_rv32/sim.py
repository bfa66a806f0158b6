"""Functional RV32 simulator with the posit-reinterpreted F extension.

One ``Simulator`` owns a ``MachineState`` (integer registers, posit
registers, memory, pcsr, cycle counter) and executes RV32I plus the posit
instruction set in one of two integration modes:

* ``tight``  - the posit register file lives in the core and posit
  instructions execute inline, mirroring a tightly-coupled execution unit.
* ``coproc`` - the posit register file lives behind an offload boundary;
  every posit instruction is packaged into an ``OffloadTransaction`` (raw
  word, any integer operands it consumes, the current es-mode) and the
  ``PositCoprocessor`` decodes and executes it against its private register
  file, returning a value only when the instruction writes an integer
  register. Architectural results are identical in both modes.

Cycle accounting charges each retired instruction the latency from
``CycleModel`` (posit ops carry the documented multi-cycle latencies,
everything else one cycle). The guest exits via ECALL with a7=93; a byte
store to ``MMIO_PUTCHAR`` appends to the run's captured output.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from . import arith
from .core import PositConfig
from .isa import (
    CUSTOM0,
    CSR_FFLAGS,
    CSR_FRM,
    CSR_PCSR,
    ILLEGAL,
    Instr,
    Pcsr,
    decode_instr,
    disasm,
)

MMIO_PUTCHAR = 0x1000_0000
EXIT_SYSCALL = 93

# trap cause codes (machine-level, RISC-V numbering)
CAUSE_MISALIGNED_FETCH = 0
CAUSE_FETCH_ACCESS = 1
CAUSE_ILLEGAL_INSTRUCTION = 2
CAUSE_BREAKPOINT = 3
CAUSE_MISALIGNED_LOAD = 4
CAUSE_LOAD_ACCESS = 5
CAUSE_MISALIGNED_STORE = 6
CAUSE_STORE_ACCESS = 7
CAUSE_ECALL = 8

CAUSE_NAMES = {
    CAUSE_MISALIGNED_FETCH: "misaligned-fetch",
    CAUSE_FETCH_ACCESS: "fetch-access",
    CAUSE_ILLEGAL_INSTRUCTION: "illegal-instruction",
    CAUSE_BREAKPOINT: "breakpoint",
    CAUSE_MISALIGNED_LOAD: "misaligned-load",
    CAUSE_LOAD_ACCESS: "load-access",
    CAUSE_MISALIGNED_STORE: "misaligned-store",
    CAUSE_STORE_ACCESS: "store-access",
    CAUSE_ECALL: "ecall",
}


class Trap(Exception):
    def __init__(self, cause: int, tval: int = 0):
        super().__init__(f"{CAUSE_NAMES.get(cause, cause)} tval={tval:#x}")
        self.cause = cause
        self.tval = tval


class _Exit(Exception):
    def __init__(self, code: int):
        self.code = code


# latencies from the pipelined FPU: fused ops 8, add/sub/mul 6, iterative
# divide 20 and root 32, conversions 3, single-cycle moves/compares, and the
# 4-cycle decode+encode pass for es switching
DEFAULT_LATENCIES = {
    "FMADD.S": 8, "FMSUB.S": 8, "FNMSUB.S": 8, "FNMADD.S": 8,
    "FADD.S": 6, "FSUB.S": 6, "FMUL.S": 6,
    "FDIV.S": 20, "FSQRT.S": 32,
    "FCVT.W.S": 3, "FCVT.WU.S": 3, "FCVT.S.W": 3, "FCVT.S.WU": 3,
    "FMIN.S": 1, "FMAX.S": 1, "FEQ.S": 1, "FLT.S": 1, "FLE.S": 1,
    "FSGNJ.S": 1, "FSGNJN.S": 1, "FSGNJX.S": 1,
    "FMV.X.W": 1, "FMV.W.X": 1, "FCLASS.S": 1,
    "FCVT.ES": 4,
}


@dataclass(frozen=True)
class CycleModel:
    latency: dict = field(default_factory=lambda: dict(DEFAULT_LATENCIES))
    default: int = 1

    def cost(self, mnemonic: str) -> int:
        return self.latency.get(mnemonic, self.default)


@dataclass(frozen=True)
class SimConfig:
    mode: str = "tight"  # "tight" or "coproc"
    posit: PositConfig = field(default_factory=PositConfig.dual)
    mem_size: int = 64 * 1024 * 1024
    cycle_model: CycleModel = field(default_factory=CycleModel)
    custom_opcode: int = CUSTOM0
    offload_overhead: int = 0  # extra cycles per coprocessor transaction

    def __post_init__(self):
        if self.mode not in ("tight", "coproc"):
            raise ValueError(f"unknown integration mode {self.mode!r}")


class MachineState:
    """Architectural state: x0-x31 (x0 wired to zero), p0-p31, pc, memory."""

    def __init__(self, cfg: SimConfig):
        self.x = [0] * 32
        self.p = [0] * 32
        self.pc = 0
        self.mem = bytearray(cfg.mem_size)
        self.pcsr = Pcsr(cfg.posit.es_mode)
        self.cycles = 0
        self.instret = 0
        self.stdout = bytearray()

    def write_x(self, idx: int, value: int):
        if idx:
            self.x[idx] = value & 0xFFFFFFFF


@dataclass(frozen=True)
class OffloadTransaction:
    """One instruction shipped across the coprocessor boundary."""

    word: int
    es: int
    x_operand: int | None = None  # integer register value, when consumed
    mem_operand: int | None = None  # loaded word for posit loads
    expects_response: bool = False


@dataclass(frozen=True)
class OffloadResponse:
    value: int | None
    fflags: int


# posit instructions that return a value into the integer register file (the
# xd-style traffic) and those consuming an integer source (xs1-style)
_X_RESULT = ("FCVT.W.S", "FCVT.WU.S", "FMV.X.W", "FEQ.S", "FLT.S", "FLE.S",
             "FCLASS.S")
_X_SOURCE = ("FCVT.S.W", "FCVT.S.WU", "FMV.W.X")


def execute_posit(instr: Instr, cfg: PositConfig, regs: list,
                  x_operand: int | None = None,
                  mem_operand: int | None = None):
    """Run one posit instruction against a posit register file.

    Returns (x_result, fflags): ``x_result`` is the integer-register value
    for instructions that produce one (or the store data for FSW), else
    None. Register-file writes happen in place.
    """
    m = instr.mnemonic
    flags = 0
    if m in ("FMADD.S", "FMSUB.S", "FNMSUB.S", "FNMADD.S"):
        ctl = {
            "FMADD.S": arith.FMADD, "FMSUB.S": arith.FMSUB,
            "FNMSUB.S": arith.FNMSUB, "FNMADD.S": arith.FNMADD,
        }[m]
        regs[instr.rd] = arith.fma(regs[instr.rs1], regs[instr.rs2],
                                   regs[instr.rs3], ctl, cfg)
        return None, 0
    if m == "FADD.S":
        regs[instr.rd] = arith.add(regs[instr.rs1], regs[instr.rs2], cfg)
        return None, 0
    if m == "FSUB.S":
        regs[instr.rd] = arith.sub(regs[instr.rs1], regs[instr.rs2], cfg)
        return None, 0
    if m == "FMUL.S":
        regs[instr.rd] = arith.mul(regs[instr.rs1], regs[instr.rs2], cfg)
        return None, 0
    if m == "FDIV.S":
        regs[instr.rd], flags = arith.div(regs[instr.rs1], regs[instr.rs2], cfg)
        return None, flags
    if m == "FSQRT.S":
        regs[instr.rd] = arith.sqrt(regs[instr.rs1], cfg)
        return None, 0
    if m in ("FSGNJ.S", "FSGNJN.S", "FSGNJX.S"):
        kind = {"FSGNJ.S": "SGNJ", "FSGNJN.S": "SGNJN", "FSGNJX.S": "SGNJX"}[m]
        regs[instr.rd] = arith.sign_inject(regs[instr.rs1], regs[instr.rs2],
                                           kind, cfg.ps)
        return None, 0
    if m == "FMIN.S":
        regs[instr.rd] = arith.minnum(regs[instr.rs1], regs[instr.rs2], cfg.ps)
        return None, 0
    if m == "FMAX.S":
        regs[instr.rd] = arith.maxnum(regs[instr.rs1], regs[instr.rs2], cfg.ps)
        return None, 0
    if m == "FEQ.S":
        return int(arith.compare_eq(regs[instr.rs1], regs[instr.rs2])), 0
    if m == "FLT.S":
        return int(arith.compare_lt(regs[instr.rs1], regs[instr.rs2], cfg.ps)), 0
    if m == "FLE.S":
        return int(arith.compare_le(regs[instr.rs1], regs[instr.rs2], cfg.ps)), 0
    if m == "FCLASS.S":
        return arith.classify(regs[instr.rs1], cfg.ps), 0
    if m in ("FCVT.W.S", "FCVT.WU.S"):
        return arith.posit_to_int(regs[instr.rs1], cfg,
                                  unsigned=m == "FCVT.WU.S",
                                  round_to_zero=instr.rm == 1), 0
    if m in ("FCVT.S.W", "FCVT.S.WU"):
        regs[instr.rd] = arith.int_to_posit(x_operand, cfg,
                                            unsigned=m == "FCVT.S.WU")
        return None, 0
    if m == "FMV.X.W":
        return regs[instr.rs1], 0
    if m == "FMV.W.X":
        regs[instr.rd] = x_operand & 0xFFFFFFFF
        return None, 0
    if m == "FLW":
        regs[instr.rd] = mem_operand
        return None, 0
    if m == "FSW":
        return regs[instr.rs2], 0
    if m == "FCVT.ES":
        # single shared rs1/rd field: the conversion is in place
        regs[instr.rd] = arith.convert_es(regs[instr.rd], instr.rs1, instr.rs2,
                                          cfg.ps)
        return None, 0
    raise Trap(CAUSE_ILLEGAL_INSTRUCTION, instr.raw)


class PositCoprocessor:
    """Posit unit behind the offload boundary; owns its register file."""

    def __init__(self, cfg: PositConfig, custom_opcode: int = CUSTOM0):
        self.base_cfg = cfg
        self.custom_opcode = custom_opcode
        self.p = [0] * 32

    def execute(self, txn: OffloadTransaction) -> OffloadResponse:
        instr = decode_instr(txn.word, self.custom_opcode)
        if instr.mnemonic == ILLEGAL:
            raise Trap(CAUSE_ILLEGAL_INSTRUCTION, txn.word)
        cfg = self.base_cfg.with_es(txn.es)
        x_result, flags = execute_posit(instr, cfg, self.p,
                                        x_operand=txn.x_operand,
                                        mem_operand=txn.mem_operand)
        return OffloadResponse(x_result, flags)


@dataclass
class Report:
    status: str
    exit_code: int = 0
    trap_cause: str = ""
    trap_tval: int = 0
    pc: int = 0
    instructions: int = 0
    cycles: int = 0
    fflags: int = 0
    es_mode: int = 2
    stdout: bytes = b""
    x: tuple = ()
    p: tuple = ()

    def to_text(self) -> str:
        lines = [
            f"status: {self.status}",
            f"exit_code: {self.exit_code}",
            f"trap_cause: {self.trap_cause or '-'}",
            f"trap_tval: {self.trap_tval:#010x}",
            f"pc: {self.pc:#010x}",
            f"instructions: {self.instructions}",
            f"cycles: {self.cycles}",
            f"fflags: {self.fflags:#04x}",
            f"es_mode: {self.es_mode}",
            f"stdout: {self.stdout.decode('utf-8', 'backslashreplace')!r}",
        ]
        lines += [f"x{i:02d}: {v:#010x}" for i, v in enumerate(self.x)]
        lines += [f"p{i:02d}: {v:#010x}" for i, v in enumerate(self.p)]
        return "\n".join(lines)


def parse_report(text: str) -> dict:
    """Parse the key: value report back into a dict (test harness helper)."""
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition(":")
        out[key.strip()] = value.strip()
    return out


def _sx(v: int) -> int:
    return v - (1 << 32) if v & 0x80000000 else v


class Simulator:
    def __init__(self, config: SimConfig | None = None):
        self.config = config or SimConfig()
        self.state = MachineState(self.config)
        self.coproc = (PositCoprocessor(self.config.posit, self.config.custom_opcode)
                       if self.config.mode == "coproc" else None)
        self._decode_cache: dict[int, Instr] = {}
        self.trace_sink = None  # callable(str) when tracing

    # ── memory ──────────────────────────────────────────────────────

    def load_bytes(self, addr: int, data: bytes):
        if addr < 0 or addr + len(data) > len(self.state.mem):
            raise ValueError(f"image does not fit at {addr:#x}")
        self.state.mem[addr:addr + len(data)] = data

    def _check(self, addr: int, size: int, cause: int):
        if addr & (size - 1):
            raise Trap(cause - 1, addr)  # the misaligned cause sits one below
        if addr + size > len(self.state.mem):
            raise Trap(cause, addr)

    def load(self, addr: int, size: int, signed: bool = False) -> int:
        self._check(addr, size, CAUSE_LOAD_ACCESS)
        v = int.from_bytes(self.state.mem[addr:addr + size], "little")
        if signed and v & (1 << (size * 8 - 1)):
            v -= 1 << (size * 8)
        return v

    def store(self, addr: int, size: int, value: int):
        if size == 1 and addr == MMIO_PUTCHAR:
            self.state.stdout.append(value & 0xFF)
            return
        self._check(addr, size, CAUSE_STORE_ACCESS)
        self.state.mem[addr:addr + size] = (value & ((1 << (size * 8)) - 1)
                                            ).to_bytes(size, "little")

    # ── posit register access respecting the integration mode ───────

    @property
    def p_regs(self) -> list:
        return self.coproc.p if self.coproc else self.state.p

    # ── execution ───────────────────────────────────────────────────

    def _fetch(self) -> Instr:
        pc = self.state.pc
        if pc & 3:
            raise Trap(CAUSE_MISALIGNED_FETCH, pc)
        if pc < 0 or pc + 4 > len(self.state.mem):
            raise Trap(CAUSE_FETCH_ACCESS, pc)
        word = int.from_bytes(self.state.mem[pc:pc + 4], "little")
        instr = self._decode_cache.get(word)
        if instr is None:
            instr = decode_instr(word, self.config.custom_opcode)
            self._decode_cache[word] = instr
        return instr

    def _posit_op(self, instr: Instr, writes: list):
        """Dispatch one posit instruction per the integration mode."""
        st = self.state
        m = instr.mnemonic
        mem_operand = None
        if m == "FLW":
            addr = (st.x[instr.rs1] + instr.imm) & 0xFFFFFFFF
            mem_operand = self.load(addr, 4)
        if self.coproc is not None:
            x_operand = st.x[instr.rs1] if m in _X_SOURCE else None
            txn = OffloadTransaction(
                word=instr.raw, es=st.pcsr.es_mode.es, x_operand=x_operand,
                mem_operand=mem_operand,
                expects_response=m in _X_RESULT or m == "FSW")
            resp = self.coproc.execute(txn)
            x_result, flags = resp.value, resp.fflags
            st.cycles += self.config.offload_overhead
        else:
            cfg = self.config.posit.with_es(st.pcsr.es_mode.es)
            x_result, flags = execute_posit(instr, cfg, st.p,
                                            x_operand=st.x[instr.rs1],
                                            mem_operand=mem_operand)
        if flags:
            # committed with the result, like a write-back stage would
            st.pcsr.dz = st.pcsr.dz or bool(flags & (1 << 3))
            writes.append("fflags=DZ")
        if m == "FSW":
            addr = (st.x[instr.rs1] + instr.imm) & 0xFFFFFFFF
            self.store(addr, 4, x_result)
            writes.append(f"mem[{addr:#x}]={x_result:#010x}")
        elif m in _X_RESULT:
            st.write_x(instr.rd, x_result)
            writes.append(f"x{instr.rd}={st.x[instr.rd]:#010x}")
        else:
            # every remaining posit op writes p[rd] (p0 is a real register)
            writes.append(f"p{instr.rd}={self.p_regs[instr.rd]:#010x}")
        st.pc += 4

    def step(self):
        """Fetch, decode, execute one instruction; charge its latency."""
        st = self.state
        instr = self._fetch()
        m = instr.mnemonic
        writes: list[str] = []
        pc0 = st.pc

        if m == ILLEGAL:
            raise Trap(CAUSE_ILLEGAL_INSTRUCTION, instr.raw)

        if m in DEFAULT_LATENCIES or m in ("FLW", "FSW"):
            self._posit_op(instr, writes)
        else:
            self._int_op(instr, writes)

        st.cycles += self.config.cycle_model.cost(m)
        st.instret += 1
        if self.trace_sink is not None:
            self.trace_sink(f"{st.cycles} {pc0:#010x} {instr.raw:#010x} "
                            f"{disasm(instr, self.config.custom_opcode)} "
                            f"{' '.join(writes)}".rstrip())

    def _int_op(self, instr: Instr, writes: list):
        st = self.state
        x = st.x
        m = instr.mnemonic
        rd, rs1, rs2, imm = instr.rd, instr.rs1, instr.rs2, instr.imm
        next_pc = st.pc + 4

        if m == "ADDI":
            st.write_x(rd, x[rs1] + imm)
        elif m == "ADD":
            st.write_x(rd, x[rs1] + x[rs2])
        elif m == "SUB":
            st.write_x(rd, x[rs1] - x[rs2])
        elif m == "LUI":
            st.write_x(rd, imm)
        elif m == "AUIPC":
            st.write_x(rd, st.pc + imm)
        elif m == "JAL":
            st.write_x(rd, st.pc + 4)
            next_pc = (st.pc + imm) & 0xFFFFFFFF
        elif m == "JALR":
            target = (x[rs1] + imm) & 0xFFFFFFFE
            st.write_x(rd, st.pc + 4)
            next_pc = target
        elif m in ("BEQ", "BNE", "BLT", "BGE", "BLTU", "BGEU"):
            a, b = x[rs1], x[rs2]
            taken = {
                "BEQ": a == b, "BNE": a != b,
                "BLT": _sx(a) < _sx(b), "BGE": _sx(a) >= _sx(b),
                "BLTU": a < b, "BGEU": a >= b,
            }[m]
            if taken:
                next_pc = (st.pc + imm) & 0xFFFFFFFF
        elif m == "LW":
            st.write_x(rd, self.load((x[rs1] + imm) & 0xFFFFFFFF, 4))
        elif m == "LH":
            st.write_x(rd, self.load((x[rs1] + imm) & 0xFFFFFFFF, 2, signed=True))
        elif m == "LHU":
            st.write_x(rd, self.load((x[rs1] + imm) & 0xFFFFFFFF, 2))
        elif m == "LB":
            st.write_x(rd, self.load((x[rs1] + imm) & 0xFFFFFFFF, 1, signed=True))
        elif m == "LBU":
            st.write_x(rd, self.load((x[rs1] + imm) & 0xFFFFFFFF, 1))
        elif m == "SW":
            addr = (x[rs1] + imm) & 0xFFFFFFFF
            self.store(addr, 4, x[rs2])
            writes.append(f"mem[{addr:#x}]={x[rs2]:#010x}")
        elif m == "SH":
            addr = (x[rs1] + imm) & 0xFFFFFFFF
            self.store(addr, 2, x[rs2])
        elif m == "SB":
            addr = (x[rs1] + imm) & 0xFFFFFFFF
            self.store(addr, 1, x[rs2])
        elif m == "SLTI":
            st.write_x(rd, int(_sx(x[rs1]) < imm))
        elif m == "SLTIU":
            st.write_x(rd, int(x[rs1] < (imm & 0xFFFFFFFF)))
        elif m == "XORI":
            st.write_x(rd, x[rs1] ^ imm)
        elif m == "ORI":
            st.write_x(rd, x[rs1] | imm)
        elif m == "ANDI":
            st.write_x(rd, x[rs1] & imm)
        elif m == "SLLI":
            st.write_x(rd, x[rs1] << imm)
        elif m == "SRLI":
            st.write_x(rd, x[rs1] >> imm)
        elif m == "SRAI":
            st.write_x(rd, _sx(x[rs1]) >> imm)
        elif m == "SLL":
            st.write_x(rd, x[rs1] << (x[rs2] & 31))
        elif m == "SRL":
            st.write_x(rd, x[rs1] >> (x[rs2] & 31))
        elif m == "SRA":
            st.write_x(rd, _sx(x[rs1]) >> (x[rs2] & 31))
        elif m == "SLT":
            st.write_x(rd, int(_sx(x[rs1]) < _sx(x[rs2])))
        elif m == "SLTU":
            st.write_x(rd, int(x[rs1] < x[rs2]))
        elif m == "XOR":
            st.write_x(rd, x[rs1] ^ x[rs2])
        elif m == "OR":
            st.write_x(rd, x[rs1] | x[rs2])
        elif m == "AND":
            st.write_x(rd, x[rs1] & x[rs2])
        elif m in ("FENCE", "FENCE.I"):
            pass
        elif m in ("CSRRW", "CSRRS", "CSRRC", "CSRRWI", "CSRRSI", "CSRRCI"):
            self._csr_op(instr)
            writes.append(f"x{rd}={x[rd]:#010x}")
        elif m == "ECALL":
            if x[17] == EXIT_SYSCALL:
                st.instret += 1
                st.cycles += 1
                raise _Exit(x[10])
            raise Trap(CAUSE_ECALL, x[17])
        elif m == "EBREAK":
            raise Trap(CAUSE_BREAKPOINT, st.pc)
        else:
            raise Trap(CAUSE_ILLEGAL_INSTRUCTION, instr.raw)

        if rd and m not in ("SW", "SH", "SB", "FENCE", "FENCE.I") \
                and not m.startswith("CSR") and m not in ("ECALL", "EBREAK"):
            writes.append(f"x{rd}={x[rd]:#010x}")
        st.pc = next_pc

    def _csr_op(self, instr: Instr):
        st = self.state
        m = instr.mnemonic
        src = instr.rs1 if m.endswith("I") else st.x[instr.rs1]
        op = {"W": "rw", "S": "rs", "C": "rc"}[m[4]]
        if instr.csr not in (CSR_FFLAGS, CSR_FRM, CSR_PCSR):
            raise Trap(CAUSE_ILLEGAL_INSTRUCTION, instr.raw)
        # set/clear with a zero source must not write at all
        if op in ("rs", "rc") and (instr.rs1 == 0):
            old = st.pcsr.access(instr.csr, "rs", 0)
        else:
            old = st.pcsr.access(instr.csr, op, src)
        st.write_x(instr.rd, old)
        st.pc += 4

    def run(self, fuel: int = 10_000_000) -> Report:
        """Execute until guest exit, trap, or fuel exhaustion."""
        st = self.state
        status, code, cause, tval = "fuel-exhausted", 0, "", 0
        try:
            for _ in range(fuel):
                self.step()
        except _Exit as e:
            status, code = "ok", e.code
        except Trap as t:
            status, cause, tval = "trap", CAUSE_NAMES.get(t.cause, str(t.cause)), t.tval
        return Report(
            status=status, exit_code=code, trap_cause=cause, trap_tval=tval,
            pc=st.pc, instructions=st.instret, cycles=st.cycles,
            fflags=st.pcsr.fflags, es_mode=st.pcsr.es_mode.es,
            stdout=bytes(st.stdout), x=tuple(st.x), p=tuple(self.p_regs),
        )


# ── program images ──────────────────────────────────────────────────

PT_LOAD = 1


def parse_elf32(data: bytes):
    """Minimal ELF32 reader: (entry, [(vaddr, bytes)]) from PT_LOAD only."""
    if data[:4] != b"\x7fELF":
        raise ValueError("not an ELF image")
    if data[4] != 1 or data[5] != 1:
        raise ValueError("only little-endian ELF32 is supported")
    entry, phoff = struct.unpack_from("<II", data, 24)
    phentsize, phnum = struct.unpack_from("<HH", data, 42)
    segments = []
    for i in range(phnum):
        off = phoff + i * phentsize
        p_type, p_offset, p_vaddr = struct.unpack_from("<III", data, off)
        p_filesz, p_memsz = struct.unpack_from("<II", data, off + 16)
        if p_type != PT_LOAD:
            continue
        blob = bytearray(data[p_offset:p_offset + p_filesz])
        blob.extend(b"\x00" * (p_memsz - p_filesz))
        segments.append((p_vaddr, bytes(blob)))
    return entry, segments


def load_image(sim: Simulator, data: bytes, base: int = 0x1000,
               entry: int | None = None) -> int:
    """Load an ELF or flat binary; returns the entry point."""
    if data[:4] == b"\x7fELF":
        elf_entry, segments = parse_elf32(data)
        for vaddr, blob in segments:
            sim.load_bytes(vaddr, blob)
        start = elf_entry if entry is None else entry
    else:
        sim.load_bytes(base, data)
        start = base if entry is None else entry
    sim.state.pc = start
    return start
