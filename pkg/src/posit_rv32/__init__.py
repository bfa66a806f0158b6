"""Posit arithmetic core, RV32 posit-FPU simulator, and exact oracle.

Submodules: ``core`` (format decode/encode), ``arith`` (FPU operations),
``oracle`` (exact rational ground truth), ``isa`` (instruction encodings and
the posit CSR), ``sim`` (RV32 simulator, both integration modes), ``asm``
(mini assembler), ``bench`` (accuracy benchmarks), ``conformance``
(exhaustive/fuzz checking), ``cli`` (command-line entry point).
"""

from .core import (
    DecodedPosit,
    EsMode,
    EsModeError,
    PositConfig,
    Unrounded,
    decode,
    encode,
    lift,
    negate,
)

__all__ = [
    "DecodedPosit",
    "EsMode",
    "EsModeError",
    "PositConfig",
    "Unrounded",
    "decode",
    "encode",
    "lift",
    "negate",
]
