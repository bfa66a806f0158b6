"""RV32 instruction encodings for the posit-reinterpreted F extension.

Covers the RV32I base set, the 26 floating-point instructions re-read over
posit operands (their encodings are unchanged; the rounding-mode field is
ignored everywhere except the posit-to-integer conversions), the CSR
instructions, and FCVT.ES, the es-switching instruction carried on a custom
major opcode.

``decode_instr`` never raises: malformed words decode to the ILLEGAL marker
and the simulator turns that into a trap. ``encode_instr`` is its exact
inverse and raises ``ValueError`` on unrepresentable fields.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import EsMode

CUSTOM0 = 0b0001011
FCVT_ES_FUNCT7 = 0b1111100

# CSR addresses: the posit control/status register sits at the standard fcsr
# address with the fflags/frm partial views below it
CSR_FFLAGS = 0x001
CSR_FRM = 0x002
CSR_PCSR = 0x003

ILLEGAL = "ILLEGAL"


@dataclass(frozen=True)
class Instr:
    """One decoded instruction; unused fields stay zero.

    For FCVT.ES, ``rd`` is the shared rs1/rd posit register, ``rs1`` holds
    the from-es value and ``rs2`` the to-es value.
    """

    mnemonic: str
    rd: int = 0
    rs1: int = 0
    rs2: int = 0
    rs3: int = 0
    imm: int = 0
    rm: int = 0
    csr: int = 0
    raw: int = 0


def _sext(value: int, bits: int) -> int:
    return value - (1 << bits) if value & (1 << (bits - 1)) else value


# instruction format per mnemonic, used by both encoder and disassembler
# formats: R, R4, I, S, B, U, J, CSR, CSRI, SYS, FCVTES
_BRANCH = {0: "BEQ", 1: "BNE", 4: "BLT", 5: "BGE", 6: "BLTU", 7: "BGEU"}
_LOAD = {0: "LB", 1: "LH", 2: "LW", 4: "LBU", 5: "LHU"}
_STORE = {0: "SB", 1: "SH", 2: "SW"}
_ALU_IMM = {0: "ADDI", 2: "SLTI", 3: "SLTIU", 4: "XORI", 6: "ORI", 7: "ANDI"}
_ALU = {0: "ADD", 1: "SLL", 2: "SLT", 3: "SLTU", 4: "XOR", 5: "SRL", 6: "OR", 7: "AND"}
_ALU_ALT = {0: "SUB", 5: "SRA"}
_CSR = {1: "CSRRW", 2: "CSRRS", 3: "CSRRC", 5: "CSRRWI", 6: "CSRRSI", 7: "CSRRCI"}
_R4 = {0x43: "FMADD.S", 0x47: "FMSUB.S", 0x4B: "FNMSUB.S", 0x4F: "FNMADD.S"}
_SGNJ = {0: "FSGNJ.S", 1: "FSGNJN.S", 2: "FSGNJX.S"}
_MINMAX = {0: "FMIN.S", 1: "FMAX.S"}
_FCMP = {0: "FLE.S", 1: "FLT.S", 2: "FEQ.S"}

# posit instructions whose operands live in the posit register file, keyed by
# which fields are posit registers (for disassembly and the offload contract)
P_REG_FIELDS = {
    "FMADD.S": "d123", "FMSUB.S": "d123", "FNMSUB.S": "d123", "FNMADD.S": "d123",
    "FADD.S": "d12", "FSUB.S": "d12", "FMUL.S": "d12", "FDIV.S": "d12",
    "FSQRT.S": "d1", "FSGNJ.S": "d12", "FSGNJN.S": "d12", "FSGNJX.S": "d12",
    "FMIN.S": "d12", "FMAX.S": "d12",
    "FCVT.W.S": "1", "FCVT.WU.S": "1", "FCVT.S.W": "d", "FCVT.S.WU": "d",
    "FMV.X.W": "1", "FMV.W.X": "d",
    "FEQ.S": "12", "FLT.S": "12", "FLE.S": "12", "FCLASS.S": "1",
    "FLW": "d", "FSW": "2", "FCVT.ES": "d",
}

F_MNEMONICS = tuple(m for m in P_REG_FIELDS if m not in ("FLW", "FSW", "FCVT.ES"))


def decode_instr(word: int, custom_opcode: int = CUSTOM0) -> Instr:
    """Classify a 32-bit word; unrecognized encodings become ILLEGAL."""
    word &= 0xFFFFFFFF
    opcode = word & 0x7F
    rd = (word >> 7) & 0x1F
    funct3 = (word >> 12) & 0x7
    rs1 = (word >> 15) & 0x1F
    rs2 = (word >> 20) & 0x1F
    funct7 = (word >> 25) & 0x7F

    def ill():
        return Instr(ILLEGAL, raw=word)

    if opcode == 0x37:
        return Instr("LUI", rd=rd, imm=word & 0xFFFFF000, raw=word)
    if opcode == 0x17:
        return Instr("AUIPC", rd=rd, imm=word & 0xFFFFF000, raw=word)
    if opcode == 0x6F:
        imm = (((word >> 31) & 1) << 20) | (((word >> 12) & 0xFF) << 12) \
            | (((word >> 20) & 1) << 11) | (((word >> 21) & 0x3FF) << 1)
        return Instr("JAL", rd=rd, imm=_sext(imm, 21), raw=word)
    if opcode == 0x67:
        if funct3 != 0:
            return ill()
        return Instr("JALR", rd=rd, rs1=rs1, imm=_sext(word >> 20, 12), raw=word)
    if opcode == 0x63:
        if funct3 not in _BRANCH:
            return ill()
        imm = (((word >> 31) & 1) << 12) | (((word >> 7) & 1) << 11) \
            | (((word >> 25) & 0x3F) << 5) | (((word >> 8) & 0xF) << 1)
        return Instr(_BRANCH[funct3], rs1=rs1, rs2=rs2, imm=_sext(imm, 13), raw=word)
    if opcode == 0x03:
        if funct3 not in _LOAD:
            return ill()
        return Instr(_LOAD[funct3], rd=rd, rs1=rs1, imm=_sext(word >> 20, 12), raw=word)
    if opcode == 0x23:
        if funct3 not in _STORE:
            return ill()
        imm = ((word >> 25) << 5) | rd
        return Instr(_STORE[funct3], rs1=rs1, rs2=rs2, imm=_sext(imm, 12), raw=word)
    if opcode == 0x13:
        if funct3 == 1:
            return Instr("SLLI", rd=rd, rs1=rs1, imm=rs2, raw=word) if funct7 == 0 else ill()
        if funct3 == 5:
            if funct7 == 0:
                return Instr("SRLI", rd=rd, rs1=rs1, imm=rs2, raw=word)
            if funct7 == 0x20:
                return Instr("SRAI", rd=rd, rs1=rs1, imm=rs2, raw=word)
            return ill()
        return Instr(_ALU_IMM[funct3], rd=rd, rs1=rs1, imm=_sext(word >> 20, 12), raw=word)
    if opcode == 0x33:
        if funct7 == 0 and funct3 in _ALU:
            return Instr(_ALU[funct3], rd=rd, rs1=rs1, rs2=rs2, raw=word)
        if funct7 == 0x20 and funct3 in _ALU_ALT:
            return Instr(_ALU_ALT[funct3], rd=rd, rs1=rs1, rs2=rs2, raw=word)
        return ill()
    if opcode == 0x0F:
        if funct3 == 0:
            return Instr("FENCE", rd=rd, rs1=rs1, imm=_sext(word >> 20, 12), raw=word)
        if funct3 == 1:
            return Instr("FENCE.I", rd=rd, rs1=rs1, imm=_sext(word >> 20, 12), raw=word)
        return ill()
    if opcode == 0x73:
        if funct3 == 0:
            if word == 0x00000073:
                return Instr("ECALL", raw=word)
            if word == 0x00100073:
                return Instr("EBREAK", raw=word)
            return ill()
        if funct3 in _CSR:
            return Instr(_CSR[funct3], rd=rd, rs1=rs1, csr=word >> 20, raw=word)
        return ill()
    if opcode == 0x07:
        if funct3 != 2:
            return ill()
        return Instr("FLW", rd=rd, rs1=rs1, imm=_sext(word >> 20, 12), raw=word)
    if opcode == 0x27:
        if funct3 != 2:
            return ill()
        imm = ((word >> 25) << 5) | rd
        return Instr("FSW", rs1=rs1, rs2=rs2, imm=_sext(imm, 12), raw=word)
    if opcode in _R4:
        if (word >> 25) & 3 != 0:  # fmt must be .S
            return ill()
        rs3 = (word >> 27) & 0x1F
        return Instr(_R4[opcode], rd=rd, rs1=rs1, rs2=rs2, rs3=rs3, rm=funct3, raw=word)
    if opcode == 0x53:
        if funct7 == 0b0000000:
            return Instr("FADD.S", rd=rd, rs1=rs1, rs2=rs2, rm=funct3, raw=word)
        if funct7 == 0b0000100:
            return Instr("FSUB.S", rd=rd, rs1=rs1, rs2=rs2, rm=funct3, raw=word)
        if funct7 == 0b0001000:
            return Instr("FMUL.S", rd=rd, rs1=rs1, rs2=rs2, rm=funct3, raw=word)
        if funct7 == 0b0001100:
            return Instr("FDIV.S", rd=rd, rs1=rs1, rs2=rs2, rm=funct3, raw=word)
        if funct7 == 0b0101100:
            return Instr("FSQRT.S", rd=rd, rs1=rs1, rm=funct3, raw=word) if rs2 == 0 else ill()
        if funct7 == 0b0010000:
            return Instr(_SGNJ[funct3], rd=rd, rs1=rs1, rs2=rs2, raw=word) if funct3 in _SGNJ else ill()
        if funct7 == 0b0010100:
            return Instr(_MINMAX[funct3], rd=rd, rs1=rs1, rs2=rs2, raw=word) if funct3 in _MINMAX else ill()
        if funct7 == 0b1100000:
            # conversions to integer keep a live rm field: RNE or RTZ only
            if rs2 not in (0, 1) or funct3 not in (0, 1):
                return ill()
            return Instr("FCVT.WU.S" if rs2 else "FCVT.W.S", rd=rd, rs1=rs1,
                         rm=funct3, raw=word)
        if funct7 == 0b1101000:
            if rs2 not in (0, 1):
                return ill()
            return Instr("FCVT.S.WU" if rs2 else "FCVT.S.W", rd=rd, rs1=rs1,
                         rm=funct3, raw=word)
        if funct7 == 0b1110000:
            if rs2 != 0:
                return ill()
            if funct3 == 0:
                return Instr("FMV.X.W", rd=rd, rs1=rs1, raw=word)
            if funct3 == 1:
                return Instr("FCLASS.S", rd=rd, rs1=rs1, raw=word)
            return ill()
        if funct7 == 0b1010000:
            return Instr(_FCMP[funct3], rd=rd, rs1=rs1, rs2=rs2, raw=word) if funct3 in _FCMP else ill()
        if funct7 == 0b1111000:
            if rs2 == 0 and funct3 == 0:
                return Instr("FMV.W.X", rd=rd, rs1=rs1, raw=word)
            return ill()
        return ill()
    if opcode == custom_opcode:
        # only the es-switching point of the custom space is populated;
        # funct3 doubles as the xd/xs1/xs2 bits, all zero for FCVT.ES
        if funct7 == FCVT_ES_FUNCT7 and funct3 == 0:
            if rs1 in (2, 3) and rs2 in (2, 3):
                return Instr("FCVT.ES", rd=rd, rs1=rs1, rs2=rs2, raw=word)
        return ill()
    return ill()


def encode_instr(instr: Instr, custom_opcode: int = CUSTOM0) -> int:
    """Bit-exact inverse of decode_instr."""
    m = instr.mnemonic
    rd, rs1, rs2, rs3 = instr.rd, instr.rs1, instr.rs2, instr.rs3
    imm = instr.imm
    for name, reg in (("rd", rd), ("rs1", rs1), ("rs2", rs2), ("rs3", rs3)):
        if not 0 <= reg < 32:
            raise ValueError(f"{name}={reg} out of range for {m}")

    def u_type(op):
        if imm & 0xFFF or not 0 <= imm < (1 << 32):
            raise ValueError(f"U-type immediate {imm:#x} misaligned")
        return imm | (rd << 7) | op

    def i_type(op, f3, immv):
        if not -2048 <= immv < 2048:
            raise ValueError(f"I-type immediate {immv} out of range")
        return ((immv & 0xFFF) << 20) | (rs1 << 15) | (f3 << 12) | (rd << 7) | op

    def s_type(op, f3):
        if not -2048 <= imm < 2048:
            raise ValueError(f"S-type immediate {imm} out of range")
        v = imm & 0xFFF
        return ((v >> 5) << 25) | (rs2 << 20) | (rs1 << 15) | (f3 << 12) \
            | ((v & 0x1F) << 7) | op

    def r_type(f7, f3):
        return (f7 << 25) | (rs2 << 20) | (rs1 << 15) | (f3 << 12) | (rd << 7) | 0x53

    if m == "LUI":
        return u_type(0x37)
    if m == "AUIPC":
        return u_type(0x17)
    if m == "JAL":
        if not -(1 << 20) <= imm < (1 << 20) or imm & 1:
            raise ValueError(f"JAL offset {imm} unencodable")
        v = imm & 0x1FFFFF
        return (((v >> 20) & 1) << 31) | (((v >> 1) & 0x3FF) << 21) \
            | (((v >> 11) & 1) << 20) | (((v >> 12) & 0xFF) << 12) | (rd << 7) | 0x6F
    if m == "JALR":
        return i_type(0x67, 0, imm)
    if m in _BRANCH.values():
        if not -4096 <= imm < 4096 or imm & 1:
            raise ValueError(f"branch offset {imm} unencodable")
        f3 = next(k for k, v in _BRANCH.items() if v == m)
        v = imm & 0x1FFF
        return (((v >> 12) & 1) << 31) | (((v >> 5) & 0x3F) << 25) | (rs2 << 20) \
            | (rs1 << 15) | (f3 << 12) | (((v >> 1) & 0xF) << 8) | (((v >> 11) & 1) << 7) | 0x63
    if m in _LOAD.values():
        return i_type(0x03, next(k for k, v in _LOAD.items() if v == m), imm)
    if m in _STORE.values():
        return s_type(0x23, next(k for k, v in _STORE.items() if v == m))
    if m in _ALU_IMM.values():
        return i_type(0x13, next(k for k, v in _ALU_IMM.items() if v == m), imm)
    if m in ("SLLI", "SRLI", "SRAI"):
        if not 0 <= imm < 32:
            raise ValueError(f"shift amount {imm} out of range")
        f3 = 1 if m == "SLLI" else 5
        f7 = 0x20 if m == "SRAI" else 0
        return (f7 << 25) | (imm << 20) | (rs1 << 15) | (f3 << 12) | (rd << 7) | 0x13
    if m in _ALU.values():
        return (0 << 25) | (rs2 << 20) | (rs1 << 15) \
            | (next(k for k, v in _ALU.items() if v == m) << 12) | (rd << 7) | 0x33
    if m in _ALU_ALT.values():
        return (0x20 << 25) | (rs2 << 20) | (rs1 << 15) \
            | (next(k for k, v in _ALU_ALT.items() if v == m) << 12) | (rd << 7) | 0x33
    if m == "FENCE":
        return i_type(0x0F, 0, imm)
    if m == "FENCE.I":
        return i_type(0x0F, 1, imm)
    if m == "ECALL":
        return 0x00000073
    if m == "EBREAK":
        return 0x00100073
    if m in _CSR.values():
        f3 = next(k for k, v in _CSR.items() if v == m)
        if not 0 <= instr.csr < 4096:
            raise ValueError(f"csr address {instr.csr:#x} out of range")
        return (instr.csr << 20) | (rs1 << 15) | (f3 << 12) | (rd << 7) | 0x73
    if m == "FLW":
        return i_type(0x07, 2, imm)
    if m == "FSW":
        return s_type(0x27, 2)
    if m in _R4.values():
        op = next(k for k, v in _R4.items() if v == m)
        return (rs3 << 27) | (rs2 << 20) | (rs1 << 15) | (instr.rm << 12) | (rd << 7) | op
    if m == "FADD.S":
        return r_type(0b0000000, instr.rm)
    if m == "FSUB.S":
        return r_type(0b0000100, instr.rm)
    if m == "FMUL.S":
        return r_type(0b0001000, instr.rm)
    if m == "FDIV.S":
        return r_type(0b0001100, instr.rm)
    if m == "FSQRT.S":
        return (0b0101100 << 25) | (rs1 << 15) | (instr.rm << 12) | (rd << 7) | 0x53
    if m in _SGNJ.values():
        return r_type(0b0010000, next(k for k, v in _SGNJ.items() if v == m))
    if m in _MINMAX.values():
        return r_type(0b0010100, next(k for k, v in _MINMAX.items() if v == m))
    if m in ("FCVT.W.S", "FCVT.WU.S"):
        if instr.rm not in (0, 1):
            raise ValueError("posit-to-int conversions accept rm RNE(0)/RTZ(1) only")
        sel = 1 if m == "FCVT.WU.S" else 0
        return (0b1100000 << 25) | (sel << 20) | (rs1 << 15) | (instr.rm << 12) | (rd << 7) | 0x53
    if m in ("FCVT.S.W", "FCVT.S.WU"):
        sel = 1 if m == "FCVT.S.WU" else 0
        return (0b1101000 << 25) | (sel << 20) | (rs1 << 15) | (instr.rm << 12) | (rd << 7) | 0x53
    if m == "FMV.X.W":
        return (0b1110000 << 25) | (rs1 << 15) | (0 << 12) | (rd << 7) | 0x53
    if m == "FCLASS.S":
        return (0b1110000 << 25) | (rs1 << 15) | (1 << 12) | (rd << 7) | 0x53
    if m in _FCMP.values():
        return r_type(0b1010000, next(k for k, v in _FCMP.items() if v == m))
    if m == "FMV.W.X":
        return (0b1111000 << 25) | (rs1 << 15) | (rd << 7) | 0x53
    if m == "FCVT.ES":
        if rs1 not in (2, 3) or rs2 not in (2, 3):
            raise ValueError("FCVT.ES es fields must be 2 or 3")
        return (FCVT_ES_FUNCT7 << 25) | (rs2 << 20) | (rs1 << 15) | (rd << 7) | custom_opcode
    raise ValueError(f"cannot encode mnemonic {m!r}")


def disasm(instr: Instr | int, custom_opcode: int = CUSTOM0) -> str:
    """Render "MNEMONIC operands # raw=0xXXXXXXXX" for traces."""
    if isinstance(instr, int):
        instr = decode_instr(instr, custom_opcode)
    m = instr.mnemonic
    pf = P_REG_FIELDS.get(m, "")

    def reg(which, idx):
        return f"{'p' if which in pf else 'x'}{idx}"

    if m == ILLEGAL:
        body = "ILLEGAL"
    elif m in ("LUI", "AUIPC"):
        body = f"{m} x{instr.rd}, {instr.imm >> 12:#x}"
    elif m == "JAL":
        body = f"{m} x{instr.rd}, {instr.imm}"
    elif m in ("JALR",):
        body = f"{m} x{instr.rd}, {instr.imm}(x{instr.rs1})"
    elif m in _BRANCH.values():
        body = f"{m} x{instr.rs1}, x{instr.rs2}, {instr.imm}"
    elif m in _LOAD.values() or m == "FLW":
        body = f"{m} {reg('d', instr.rd)}, {instr.imm}(x{instr.rs1})"
    elif m in _STORE.values() or m == "FSW":
        body = f"{m} {reg('2', instr.rs2)}, {instr.imm}(x{instr.rs1})"
    elif m in _CSR.values():
        src = f"{instr.rs1}" if m.endswith("I") else f"x{instr.rs1}"
        body = f"{m} x{instr.rd}, {instr.csr:#x}, {src}"
    elif m in ("ECALL", "EBREAK", "FENCE", "FENCE.I"):
        body = m
    elif m in _R4.values():
        body = (f"{m} {reg('d', instr.rd)}, {reg('1', instr.rs1)}, "
                f"{reg('2', instr.rs2)}, {reg('3', instr.rs3)}")
    elif m == "FCVT.ES":
        body = f"{m} p{instr.rd}, {instr.rs1}->{instr.rs2}"
    elif m in ("FSQRT.S", "FCVT.W.S", "FCVT.WU.S", "FCVT.S.W", "FCVT.S.WU",
               "FMV.X.W", "FMV.W.X", "FCLASS.S"):
        body = f"{m} {reg('d', instr.rd)}, {reg('1', instr.rs1)}"
    elif pf:
        body = f"{m} {reg('d', instr.rd)}, {reg('1', instr.rs1)}, {reg('2', instr.rs2)}"
    elif instr.imm and m.endswith("I") or m in ("ADDI", "SLTI", "SLTIU", "XORI", "ORI", "ANDI", "SLLI", "SRLI", "SRAI"):
        body = f"{m} x{instr.rd}, x{instr.rs1}, {instr.imm}"
    else:
        body = f"{m} x{instr.rd}, x{instr.rs1}, x{instr.rs2}"
    return f"{body} # raw={instr.raw:#010x}"


@dataclass
class Pcsr:
    """Posit control/status register: DZ flag, rm tied to zero, es-mode.

    Illegal es-mode writes leave the field unchanged so software can probe
    for the supported values.
    """

    es_mode: EsMode
    dz: bool = False

    @property
    def fflags(self) -> int:
        return (1 << 3) if self.dz else 0

    def value(self) -> int:
        return (self.es_mode.es << 8) | self.fflags

    def _write_full(self, v: int):
        self.dz = bool(v & (1 << 3))
        es = (v >> 8) & 0x1F
        if es in self.es_mode.legal:
            self.es_mode = self.es_mode.with_es(es)

    def access(self, addr: int, op: str, value: int) -> int:
        """CSR read-modify-write; op is 'rw', 'rs' or 'rc'. Returns old value."""
        if addr == CSR_PCSR:
            old = self.value()
        elif addr == CSR_FFLAGS:
            old = self.fflags
        elif addr == CSR_FRM:
            old = 0
        else:
            raise KeyError(f"csr {addr:#x}")
        if op == "rs":
            new = old | value
        elif op == "rc":
            new = old & ~value
        elif op == "rw":
            new = value
        else:
            raise ValueError(f"bad csr op {op!r}")
        if addr == CSR_PCSR:
            self._write_full(new)
        elif addr == CSR_FFLAGS:
            self.dz = bool(new & (1 << 3))
        return old


def pcsr_access(pcsr: Pcsr, addr: int, op: str, value: int) -> int:
    return pcsr.access(addr, op, value)
