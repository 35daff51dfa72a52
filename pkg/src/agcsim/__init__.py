"""Desk-scale Block II Apollo Guidance Computer emulator suite."""

from .asm import AssemblerConfig, AssemblyResult, assemble, disassemble, symbols_text
from .channels import ChannelBus, Manifest, default_manifest, parse_manifest
from .cpu import (
    BOOT_ENTRY,
    Instruction,
    MachineState,
    RunOutcome,
    StepReport,
    decode,
    encode,
    run,
    step,
    trace_line,
)
from .errors import AgcError
from .executive import (
    DskyState,
    ExecConfig,
    Executive,
    VerbNounTable,
    default_table,
    format_display,
)
from .memory import BankRegisters, MemorySystem, ResolvedLocation, resolve
from .rope import (
    McmGrid,
    RopeImage,
    WeavePlan,
    banks_from_image,
    image_from_banks,
    readout,
    weave,
)
from .server import DskyServer
from .words import SignedValue, Word, compute_parity, oc_add, oc_complement, oc_double_add

__version__ = "0.1.0"

__all__ = [
    "AgcError", "AssemblerConfig", "AssemblyResult", "BankRegisters",
    "BOOT_ENTRY", "ChannelBus", "DskyServer", "DskyState", "ExecConfig",
    "Executive", "Instruction", "MachineState", "Manifest", "McmGrid",
    "MemorySystem", "ResolvedLocation", "RopeImage", "RunOutcome",
    "SignedValue", "StepReport", "VerbNounTable", "WeavePlan", "Word",
    "assemble", "banks_from_image", "compute_parity", "decode",
    "default_manifest", "default_table", "disassemble", "encode",
    "format_display", "image_from_banks", "oc_add", "oc_complement",
    "oc_double_add", "parse_manifest", "readout", "resolve", "run", "step",
    "symbols_text", "trace_line", "weave",
]
