"""Small two-pass assembler for building guest programs in tests and benches.

Mnemonic methods are generated from the instruction tables (``add``,
``fmadd_s``, ``csrrwi``, ...); labels are plain strings resolved on
``assemble()``. Branch and jump targets take a label or an absolute address.
Registers are names ("x5", "t0", "a0", "p7") or raw indices.
"""

from __future__ import annotations

import keyword

from .isa import CUSTOM0, Instr, encode_instr

ABI_NAMES = {
    "zero": 0, "ra": 1, "sp": 2, "gp": 3, "tp": 4,
    "t0": 5, "t1": 6, "t2": 7, "s0": 8, "fp": 8, "s1": 9,
    "a0": 10, "a1": 11, "a2": 12, "a3": 13, "a4": 14, "a5": 15,
    "a6": 16, "a7": 17, "s2": 18, "s3": 19, "s4": 20, "s5": 21,
    "s6": 22, "s7": 23, "s8": 24, "s9": 25, "s10": 26, "s11": 27,
    "t3": 28, "t4": 29, "t5": 30, "t6": 31,
}


def reg(name) -> int:
    if isinstance(name, int):
        return name
    if name in ABI_NAMES:
        return ABI_NAMES[name]
    if name[0] in "xp" and name[1:].isdigit():
        return int(name[1:])
    raise ValueError(f"unknown register {name!r}")


# mnemonic -> operand signature
_R3 = ("ADD SUB SLL SLT SLTU XOR SRL SRA OR AND "
       "FADD.S FSUB.S FMUL.S FDIV.S FSGNJ.S FSGNJN.S FSGNJX.S "
       "FMIN.S FMAX.S FEQ.S FLT.S FLE.S").split()
_R4 = "FMADD.S FMSUB.S FNMSUB.S FNMADD.S".split()
_R2 = ("FSQRT.S FCVT.W.S FCVT.WU.S FCVT.S.W FCVT.S.WU "
       "FMV.X.W FMV.W.X FCLASS.S").split()
_IMM = "ADDI SLTI SLTIU XORI ORI ANDI SLLI SRLI SRAI JALR".split()
_LOADS = "LB LH LW LBU LHU FLW".split()
_STORES = "SB SH SW FSW".split()
_BRANCHES = "BEQ BNE BLT BGE BLTU BGEU".split()
_CSRR = "CSRRW CSRRS CSRRC".split()
_CSRI = "CSRRWI CSRRSI CSRRCI".split()


class Assembler:
    def __init__(self, base: int = 0x1000, custom_opcode: int = CUSTOM0):
        self.base = base
        self.custom_opcode = custom_opcode
        self._items: list = []  # ("instr", Instr | fixup) or ("word", int)
        self.labels: dict[str, int] = {}

    # ── layout ──────────────────────────────────────────────────────

    @property
    def here(self) -> int:
        return self.base + 4 * len(self._items)

    def label(self, name: str) -> str:
        if name in self.labels:
            raise ValueError(f"duplicate label {name!r}")
        self.labels[name] = self.here
        return name

    def word(self, value: int):
        self._items.append(("word", value & 0xFFFFFFFF))

    def words(self, values):
        for v in values:
            self.word(v)

    def zeros(self, count: int):
        for _ in range(count):
            self.word(0)

    # ── instruction emission ────────────────────────────────────────

    def _emit(self, mnemonic, *, rd=0, rs1=0, rs2=0, rs3=0, imm=0, rm=0,
              csr=0, target=None, kind=None):
        self._items.append(("instr", (mnemonic, rd, rs1, rs2, rs3, imm, rm,
                                      csr, target, kind, self.here)))

    def _resolve(self, target) -> int:
        if isinstance(target, str):
            if target not in self.labels:
                raise ValueError(f"undefined label {target!r}")
            return self.labels[target]
        return target

    def assemble(self) -> bytes:
        out = bytearray()
        for kind, payload in self._items:
            if kind == "word":
                out += payload.to_bytes(4, "little")
                continue
            m, rd, rs1, rs2, rs3, imm, rm, csr, target, tkind, addr = payload
            if target is not None:
                dest = self._resolve(target)
                if tkind == "rel":
                    imm = dest - addr
                elif tkind == "hi":
                    imm = ((dest + 0x800) >> 12) << 12
                elif tkind == "lo":
                    hi = ((dest + 0x800) >> 12) << 12
                    imm = dest - hi
            out += encode_instr(
                Instr(m, rd=rd, rs1=rs1, rs2=rs2, rs3=rs3, imm=imm, rm=rm, csr=csr),
                self.custom_opcode).to_bytes(4, "little")
        return bytes(out)

    # ── pseudo-instructions ─────────────────────────────────────────

    def li(self, rd, value):
        """Load a 32-bit constant; always two instructions for fixed sizing."""
        value &= 0xFFFFFFFF
        hi = ((value + 0x800) >> 12) & 0xFFFFF
        lo = value - ((hi << 12) & 0xFFFFFFFF)
        lo = ((lo + 0x800) & 0xFFF) - 0x800
        self._emit("LUI", rd=reg(rd), imm=(hi << 12) & 0xFFFFFFFF)
        self._emit("ADDI", rd=reg(rd), rs1=reg(rd), imm=lo)

    def la(self, rd, label: str):
        """Load a label's absolute address (resolved at assembly)."""
        self._emit("LUI", rd=reg(rd), target=label, kind="hi")
        self._emit("ADDI", rd=reg(rd), rs1=reg(rd), target=label, kind="lo")

    def mv(self, rd, rs):
        self._emit("ADDI", rd=reg(rd), rs1=reg(rs), imm=0)

    def nop(self):
        self._emit("ADDI")

    def j(self, target):
        self._emit("JAL", rd=0, target=target, kind="rel")

    def call(self, target):
        self._emit("JAL", rd=1, target=target, kind="rel")

    def ret(self):
        self._emit("JALR", rd=0, rs1=1, imm=0)

    def jal(self, rd, target):
        self._emit("JAL", rd=reg(rd), target=target, kind="rel")

    def fcvt_es(self, preg, from_es: int, to_es: int):
        self._emit("FCVT.ES", rd=reg(preg), rs1=from_es, rs2=to_es)

    def ecall(self):
        self._emit("ECALL")

    def ebreak(self):
        self._emit("EBREAK")

    def fence(self):
        self._emit("FENCE")

    def halt(self, code=0):
        """Exit-convention epilogue: a7=93, a0=code, ecall."""
        self.li("a7", 93)
        self.li("a0", code)
        self.ecall()


def _make_r3(m):
    def f(self, rd, rs1, rs2):
        self._emit(m, rd=reg(rd), rs1=reg(rs1), rs2=reg(rs2))
    return f


def _make_r4(m):
    def f(self, rd, rs1, rs2, rs3):
        self._emit(m, rd=reg(rd), rs1=reg(rs1), rs2=reg(rs2), rs3=reg(rs3))
    return f


def _make_r2(m):
    def f(self, rd, rs1, rm=0):
        self._emit(m, rd=reg(rd), rs1=reg(rs1), rm=rm)
    return f


def _make_imm(m):
    def f(self, rd, rs1, imm):
        self._emit(m, rd=reg(rd), rs1=reg(rs1), imm=imm)
    return f


def _make_load(m):
    def f(self, rd, rs1, imm=0):
        self._emit(m, rd=reg(rd), rs1=reg(rs1), imm=imm)
    return f


def _make_store(m):
    def f(self, src, base, imm=0):
        self._emit(m, rs2=reg(src), rs1=reg(base), imm=imm)
    return f


def _make_branch(m):
    def f(self, rs1, rs2, target):
        self._emit(m, rs1=reg(rs1), rs2=reg(rs2), target=target, kind="rel")
    return f


def _make_csr(m):
    def f(self, rd, csr, rs1):
        self._emit(m, rd=reg(rd), rs1=reg(rs1), csr=csr)
    return f


def _make_csri(m):
    def f(self, rd, csr, uimm):
        self._emit(m, rd=reg(rd), rs1=uimm, csr=csr)
    return f


def _method_name(m):
    name = m.lower().replace(".", "_")
    if keyword.iskeyword(name):
        name += "_"  # a.or_ / a.and_
    return name


for _m in _R3:
    setattr(Assembler, _method_name(_m), _make_r3(_m))
for _m in _R4:
    setattr(Assembler, _method_name(_m), _make_r4(_m))
for _m in _R2:
    setattr(Assembler, _method_name(_m), _make_r2(_m))
for _m in _IMM:
    setattr(Assembler, _method_name(_m), _make_imm(_m))
for _m in _LOADS:
    setattr(Assembler, _method_name(_m), _make_load(_m))
for _m in _STORES:
    setattr(Assembler, _method_name(_m), _make_store(_m))
for _m in _BRANCHES:
    setattr(Assembler, _method_name(_m), _make_branch(_m))
for _m in _CSRR:
    setattr(Assembler, _method_name(_m), _make_csr(_m))
for _m in _CSRI:
    setattr(Assembler, _method_name(_m), _make_csri(_m))
