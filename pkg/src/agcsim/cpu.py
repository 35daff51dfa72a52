"""Fetch/decode/execute loop over the banked memory system.

Encoding layout (fixed by this repo, round-trip guaranteed against the
assembler, no claim of matching historical binaries): 3-bit opcode in the
top bits of the 15-bit word, 12-bit operand below it, with a 2-bit quarter
code splitting shared rows, and EXTEND as an escape that re-reads the
table.  Channel instructions carry a 3-bit peripheral code over a 9-bit
channel id.
"""

from dataclasses import dataclass, field

from .errors import AgcError, OperandRange, UnimplementedInstruction, UnknownMnemonic
from .memory import REG_A, REG_L, REG_Q, REG_Z, MemorySystem
from .words import OVF_NONE, oc_add, oc_complement, oc_double_add

BOOT_ENTRY = 0o2000

# special opcode-0 words
_NOOP_WORD = 0o00003
_EXTEND_WORD = 0o00006

# operand field kinds
_K12 = "addr12"      # full 12-bit address
_K12F = "addr12f"    # 12-bit address restricted to 2000-7777 (TCF)
_K10 = "addr10"      # 10-bit erasable address
_K9 = "chan9"        # 9-bit channel id
_K0 = "none"

# mnemonic -> (base word, operand kind, extended?)
ENCODING: dict[str, tuple[int, str, bool]] = {
    "TC":     (0o00000, _K12, False),
    "CCS":    (0o10000, _K10, False),
    "TCF":    (0o10000, _K12F, False),
    "DAS":    (0o20000, _K10, False),
    "ADS":    (0o26000, _K10, False),
    "CA":     (0o30000, _K12, False),
    "CS":     (0o40000, _K12, False),
    "INDEX":  (0o50000, _K10, False),
    "DXCH":   (0o52000, _K10, False),
    "TS":     (0o54000, _K10, False),
    "XCH":    (0o56000, _K10, False),
    "AD":     (0o60000, _K12, False),
    "MASK":   (0o70000, _K12, False),
    "NOOP":   (_NOOP_WORD, _K0, False),
    "EXTEND": (_EXTEND_WORD, _K0, False),
    "READ":   (0o00000, _K9, True),
    "WRITE":  (0o01000, _K9, True),
    "RAND":   (0o02000, _K9, True),
    "DCA":    (0o30000, _K12, True),
}

EXTENDED_MNEMONICS = frozenset(m for m, (_, _, ext) in ENCODING.items() if ext)


@dataclass(frozen=True)
class Instruction:
    mnemonic: str
    operand: int = 0
    extended: bool = False

    @property
    def has_operand(self) -> bool:
        return ENCODING[self.mnemonic][1] != _K0


def encode(mnemonic: str, operand: int = 0) -> int:
    """Word for a mnemonic/operand pair; OperandRange when not encodable."""
    try:
        base, kind, _ = ENCODING[mnemonic]
    except KeyError:
        raise UnknownMnemonic("unknown mnemonic %r" % mnemonic) from None
    if kind == _K0:
        if operand:
            raise OperandRange("%s takes no operand" % mnemonic)
        return base
    if kind == _K12:
        if not 0 <= operand <= 0o7777:
            raise OperandRange("%s operand %o outside 0-7777" % (mnemonic, operand))
        if mnemonic == "TC" and operand in (_NOOP_WORD, _EXTEND_WORD):
            raise OperandRange("TC %o is reserved" % operand)
    elif kind == _K12F:
        if not 0o2000 <= operand <= 0o7777:
            raise OperandRange("TCF operand %o outside 2000-7777" % operand)
    elif kind == _K10:
        if not 0 <= operand <= 0o1777:
            raise OperandRange("%s operand %o outside erasable 0-1777" % (mnemonic, operand))
    elif kind == _K9:
        if not 0 <= operand <= 0o777:
            raise OperandRange("%s channel %o outside 0-777" % (mnemonic, operand))
    return base | operand


def decode(word: int, extend: bool = False) -> Instruction:
    """Exact inverse of encode(); UnimplementedInstruction elsewhere."""
    word &= 0o77777
    op = word >> 12
    k12 = word & 0o7777
    qc = (word >> 10) & 3
    k10 = word & 0o1777
    if extend:
        if op == 0:
            pc = (word >> 9) & 7
            ch = word & 0o777
            if pc == 0:
                return Instruction("READ", ch, True)
            if pc == 1:
                return Instruction("WRITE", ch, True)
            if pc == 2:
                return Instruction("RAND", ch, True)
        elif op == 3:
            return Instruction("DCA", k12, True)
        raise UnimplementedInstruction(word, extended=True)
    if op == 0:
        if word == _NOOP_WORD:
            return Instruction("NOOP")
        if word == _EXTEND_WORD:
            return Instruction("EXTEND")
        return Instruction("TC", k12)
    if op == 1:
        return Instruction("CCS", k10) if qc == 0 else Instruction("TCF", k12)
    if op == 2:
        if qc == 0:
            return Instruction("DAS", k10)
        if qc == 3:
            return Instruction("ADS", k10)
        raise UnimplementedInstruction(word)
    if op == 3:
        return Instruction("CA", k12)
    if op == 4:
        return Instruction("CS", k12)
    if op == 5:
        return Instruction(("INDEX", "DXCH", "TS", "XCH")[qc], k10)
    if op == 6:
        return Instruction("AD", k12)
    return Instruction("MASK", k12)


class MachineState:
    """CPU snapshot: central register views plus step-loop flags."""

    def __init__(self, mem: MemorySystem, boot: int = BOOT_ENTRY):
        self.mem = mem
        self.extend_pending = False
        self.index_pending: int | None = None
        self.interrupts_enabled = True
        self.cycles = 0
        self.halted = False
        self.alarm = None
        self.z = boot

    @property
    def a(self) -> int:
        return self.mem.read(REG_A).data

    @a.setter
    def a(self, v: int) -> None:
        self.mem.write(REG_A, v)

    @property
    def l(self) -> int:
        return self.mem.read(REG_L).data

    @l.setter
    def l(self, v: int) -> None:
        self.mem.write(REG_L, v)

    @property
    def q(self) -> int:
        return self.mem.read(REG_Q).data

    @q.setter
    def q(self, v: int) -> None:
        self.mem.write(REG_Q, v)

    @property
    def z(self) -> int:
        return self.mem.read(REG_Z).data

    @z.setter
    def z(self, v: int) -> None:
        self.mem.write(REG_Z, v & 0o7777)

    def reset(self, boot: int = BOOT_ENTRY) -> None:
        """Register/flag reset; cycle counter keeps running."""
        self.a = 0
        self.l = 0
        self.q = 0
        self.z = boot
        self.mem.bank_regs.eb = 0
        self.mem.bank_regs.fb = 0
        self.extend_pending = False
        self.index_pending = None
        self.halted = False
        self.alarm = None


@dataclass
class StepReport:
    cycle: int
    addr: int
    instruction: Instruction
    a: int
    l: int
    q: int
    overflow: str = OVF_NONE


@dataclass
class RunOutcome:
    reason: str                 # halt | alarm | breakpoint | limit
    cycles: int
    z: int
    error: Exception | None = None
    reports: list = field(default_factory=list)


def step(state: MachineState) -> StepReport:
    """Execute one instruction at Z; raises machine faults undecorated."""
    assert not state.halted, "machine is halted"
    mem = state.mem
    pc = state.z
    raw = mem.read(pc).data
    if state.index_pending is not None:
        raw, _ = oc_add(raw, state.index_pending)
        state.index_pending = None
    extend = state.extend_pending
    state.extend_pending = False
    inst = decode(raw, extend)
    next_z = (pc + 1) & 0o7777
    state.z = next_z
    k = inst.operand
    ovf = OVF_NONE
    mn = inst.mnemonic

    if mn == "TC":
        target = state.q if k == REG_Q else k
        state.q = next_z
        state.z = target
        if target == pc:
            state.halted = True
    elif mn == "TCF":
        state.z = k
        if k == pc:
            state.halted = True
    elif mn == "CCS":
        v = mem.read(k).data
        if v == 0:
            skip, dabs = 1, 0
        elif v == 0o77777:
            skip, dabs = 3, 0
        elif v & 0o40000:
            skip, dabs = 2, oc_complement(v) - 1
        else:
            skip, dabs = 0, v - 1
        state.a = dabs
        state.z = (next_z + skip) & 0o7777
    elif mn == "CA":
        state.a = mem.read(k).data
    elif mn == "CS":
        state.a = oc_complement(mem.read(k).data)
    elif mn == "TS":
        mem.write(k, state.a)
    elif mn == "XCH":
        old = mem.read(k).data
        mem.write(k, state.a)
        state.a = old
    elif mn == "AD":
        state.a, ovf = oc_add(state.a, mem.read(k).data)
    elif mn == "ADS":
        s, ovf = oc_add(state.a, mem.read(k).data)
        mem.write(k, s)
        state.a = s
    elif mn == "MASK":
        state.a &= mem.read(k).data
    elif mn == "INDEX":
        state.index_pending = mem.read(k).data
    elif mn == "EXTEND":
        state.extend_pending = True
    elif mn == "NOOP":
        pass
    elif mn == "DCA":
        lo = mem.read((k + 1) & 0o7777).data
        hi = mem.read(k).data
        state.l = lo
        state.a = hi
    elif mn == "DXCH":
        k1 = (k + 1) & 0o7777
        m0, m1 = mem.read(k).data, mem.read(k1).data
        mem.write(k, state.a)
        mem.write(k1, state.l)
        state.a, state.l = m0, m1
    elif mn == "DAS":
        k1 = (k + 1) & 0o7777
        hi, lo, ovf = oc_double_add(mem.read(k).data, mem.read(k1).data,
                                    state.a, state.l)
        mem.write(k, hi)
        mem.write(k1, lo)
    elif mn == "READ":
        state.a = mem.channels.read(k)
    elif mn == "WRITE":
        mem.channels.write(k, state.a)
    elif mn == "RAND":
        state.a &= mem.channels.read(k)

    state.cycles += 1
    return StepReport(state.cycles, pc, inst, state.a, state.l, state.q, ovf)


def trace_line(report: StepReport) -> str:
    """Stable one-line trace format used by golden tests and the CLI."""
    inst = report.instruction
    operand = "%04o" % inst.operand if inst.has_operand else "----"
    return "%6d  %04o  %-6s %s  A=%05o L=%05o Q=%05o" % (
        report.cycle, report.addr, inst.mnemonic, operand,
        report.a, report.l, report.q)


def run(state: MachineState, limit: int | None = None,
        breakpoints=(), trace=None) -> RunOutcome:
    """Step until halt, alarm, breakpoint, or the cycle limit."""
    bp = set(breakpoints)
    n = 0
    while True:
        if state.halted:
            return RunOutcome("halt", state.cycles, state.z)
        if limit is not None and n >= limit:
            return RunOutcome("limit", state.cycles, state.z)
        if state.z in bp:
            return RunOutcome("breakpoint", state.cycles, state.z)
        try:
            report = step(state)
        except AgcError as exc:
            state.alarm = exc
            return RunOutcome("alarm", state.cycles, state.z, error=exc)
        if trace is not None:
            trace(report)
        n += 1
