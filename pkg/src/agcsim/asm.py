"""Two-pass assembler and disassembler for the emulator's dialect.

Source lines look like:

    LABEL   CA      FOO+2   ; trailing comment

Labels start in column 0; mnemonics are case-insensitive; symbols are
case-sensitive; ';' starts a comment.  Literals are octal unless suffixed
with 'D'.  Directives:

    ERASE name [count]      allocate erasable cells
    = name value            define a constant
    SETLOC bank offset      place emission at bank/offset
    BANK n                  switch emission bank
    OCT value               emit a raw word (labelable)
    ADRES label             emit a label's address as data (labelable)

EXTEND is inserted automatically before an extended mnemonic unless the
previous emitted word already is an explicit EXTEND.
"""

from dataclasses import dataclass, field

import numpy as np

from .cpu import ENCODING, EXTENDED_MNEMONICS, decode, encode
from .errors import (
    AsmError,
    BankOverflow,
    DuplicateLabel,
    OperandRange,
    UndefinedSymbol,
    UnimplementedInstruction,
    UnknownMnemonic,
)
from .rope import BANK_WORDS, MAX_BANKS, RopeImage
from .words import Word

FIXED_WINDOW_BASE = 0o2000

ALIASES = {
    "RETURN": ("TC", 0o2),
    "RELINT": ("NOOP", 0),
    "INHINT": ("NOOP", 0),
}

DIRECTIVES = {"ERASE", "=", "SETLOC", "BANK", "OCT", "ADRES"}

# shipped defaults, overridable by user definitions
PREDEFINED = {"BIT13": 0o20000}


@dataclass
class Symbol:
    kind: str                  # erasable | fixed | constant
    value: int
    bank: int | None = None


@dataclass
class Line:
    number: int
    text: str
    label: str | None = None
    mnemonic: str | None = None
    operands: list[str] = field(default_factory=list)
    # filled while assembling
    labels: list[tuple[str, int]] = field(default_factory=list)
    address: int | None = None
    bank: int | None = None
    auto_extend: bool = False


@dataclass
class AssemblerConfig:
    start_bank: int = 0
    start_offset: int = 0
    erasable_base: int = 0o0100


@dataclass
class AssemblyResult:
    image: RopeImage
    symbols: dict[str, Symbol]
    listing: str


def is_statement_word(token: str) -> bool:
    up = token.upper()
    return up in DIRECTIVES or up in ENCODING or up in ALIASES


def parse_source(text: str) -> list[Line]:
    lines = []
    for number, raw in enumerate(text.splitlines(), 1):
        body = raw.split(";", 1)[0].rstrip()
        line = Line(number, raw.rstrip("\n"))
        if body.strip():
            tokens = body.split()
            if body[0] not in " \t" and not is_statement_word(tokens[0]):
                line.label = tokens[0]
                tokens = tokens[1:]
            if tokens:
                line.mnemonic = tokens[0].upper()
                line.operands = tokens[1:]
        lines.append(line)
    return lines


def _parse_literal(tok: str, number: int) -> int:
    try:
        if tok.upper().endswith("D"):
            return int(tok[:-1], 10)
        return int(tok, 8)
    except ValueError:
        raise AsmError("bad literal %r" % tok, line=number) from None


def _split_expr(tok: str) -> tuple[str, str, str]:
    for sep in ("+", "-"):
        if sep in tok[1:]:
            name, off = tok.split(sep, 1)
            return name, sep, off
    return tok, "", ""


class _Assembly:
    """Working state shared by the two passes."""

    def __init__(self, config: AssemblerConfig):
        self.config = config
        self.symbols: dict[str, Symbol] = {}
        self.bank = config.start_bank
        self.offset = config.start_offset
        self.high_water = {config.start_bank: config.start_offset}
        self.erasable_next = config.erasable_base
        self.last_emit: tuple[int, int, str] | None = None   # bank, offset, mnemonic
        self.words: dict[int, dict[int, int]] = {}
        self.emitted: list[tuple[Line, int, int, int]] = []  # line, bank, offset, word

    def define(self, name: str, sym: Symbol, number: int) -> None:
        if name in self.symbols:
            raise DuplicateLabel("symbol %r already defined" % name, line=number)
        self.symbols[name] = sym

    def lookup(self, name: str, number: int) -> Symbol:
        sym = self.symbols.get(name)
        if sym is None:
            if name in PREDEFINED:
                return Symbol("constant", PREDEFINED[name])
            raise UndefinedSymbol("symbol %r is not defined" % name, line=number)
        return sym

    def resolve(self, tok: str, number: int) -> int:
        name, sep, off = _split_expr(tok)
        if name[0].isdigit():
            return _parse_literal(tok, number)
        value = self.lookup(name, number).value
        if sep:
            delta = _parse_literal(off, number)
            value = value + delta if sep == "+" else value - delta
        return value

    def advance(self, number: int, count: int = 1) -> int:
        at = self.offset
        if at + count > BANK_WORDS:
            raise BankOverflow("bank %o exceeds %d words" % (self.bank, BANK_WORDS),
                               line=number)
        self.offset += count
        self.high_water[self.bank] = max(self.high_water.get(self.bank, 0), self.offset)
        return at

    # --- pass 1: addresses and symbols ---

    def place(self, line: Line) -> None:
        mn = line.mnemonic
        n = line.number
        if mn == "ERASE":
            if not line.operands:
                raise AsmError("ERASE needs a name", line=n)
            count = _parse_literal(line.operands[1], n) if len(line.operands) > 1 else 1
            addr = self.erasable_next
            if addr + count > 0o1400:
                raise AsmError("erasable arena exhausted", line=n)
            self.erasable_next += count
            self.define(line.operands[0], Symbol("erasable", addr, addr >> 8), n)
            return
        if mn == "=":
            if len(line.operands) != 2:
                raise AsmError("= needs a name and a value", line=n)
            self.define(line.operands[0],
                        Symbol("constant", self.resolve(line.operands[1], n)), n)
            return
        if mn == "SETLOC":
            if len(line.operands) != 2:
                raise AsmError("SETLOC needs bank and offset", line=n)
            bank = _parse_literal(line.operands[0], n)
            offset = _parse_literal(line.operands[1], n)
            if not 0 <= bank < MAX_BANKS or not 0 <= offset < BANK_WORDS:
                raise AsmError("SETLOC %o %o out of range" % (bank, offset), line=n)
            self.bank, self.offset = bank, offset
            return
        if mn == "BANK":
            if len(line.operands) != 1:
                raise AsmError("BANK needs a bank number", line=n)
            bank = _parse_literal(line.operands[0], n)
            if not 0 <= bank < MAX_BANKS:
                raise AsmError("BANK %o out of range" % bank, line=n)
            self.bank = bank
            self.offset = self.high_water.get(bank, 0)
            return
        # word-emitting statements
        canonical = ALIASES.get(mn, (mn, None))[0]
        if canonical not in ENCODING and mn not in ("OCT", "ADRES"):
            raise UnknownMnemonic("unknown mnemonic %r" % mn, line=n)
        if canonical in EXTENDED_MNEMONICS:
            adjacent = (self.last_emit is not None
                        and self.last_emit[0] == self.bank
                        and self.last_emit[1] == self.offset - 1)
            if not (adjacent and self.last_emit[2] == "EXTEND"):
                line.auto_extend = True
                self.advance(n)
        at = self.advance(n)
        line.bank = self.bank
        line.address = FIXED_WINDOW_BASE + at
        entry = at - (1 if line.auto_extend else 0)
        for name, num in line.labels:
            self.define(name, Symbol("fixed", FIXED_WINDOW_BASE + entry, self.bank), num)
        self.last_emit = (self.bank, at, canonical)

    # --- pass 2: encoding ---

    def emit(self, line: Line) -> None:
        n = line.number
        mn = line.mnemonic
        offset = line.address - FIXED_WINDOW_BASE
        if line.auto_extend:
            self._store(line, line.bank, offset - 1, encode("EXTEND"))
        if mn == "OCT":
            if len(line.operands) != 1:
                raise AsmError("OCT needs one value", line=n)
            word = _parse_literal(line.operands[0], n)
            if not 0 <= word <= 0o77777:
                raise OperandRange("OCT %o outside 15 bits" % word, line=n)
        elif mn == "ADRES":
            if len(line.operands) != 1:
                raise AsmError("ADRES needs a label", line=n)
            word = self.resolve(line.operands[0], n)
        else:
            name, alias_operand = ALIASES.get(mn, (mn, None))
            takes_operand = alias_operand is None and ENCODING[name][1] != "none"
            if line.operands and not takes_operand:
                raise AsmError("%s takes no operand" % mn, line=n)
            if takes_operand and not line.operands:
                raise AsmError("%s needs an operand" % mn, line=n)
            if takes_operand:
                operand = self.resolve(line.operands[0], n)
            else:
                operand = alias_operand or 0
            try:
                word = encode(name, operand)
            except OperandRange as exc:
                raise OperandRange(str(exc), line=n) from None
        self._store(line, line.bank, offset, word)

    def _store(self, line: Line, bank: int, offset: int, word: int) -> None:
        slots = self.words.setdefault(bank, {})
        if offset in slots:
            raise AsmError("bank %o offset %04o emitted twice" % (bank, offset),
                           line=line.number)
        slots[offset] = word
        self.emitted.append((line, bank, offset, word))


def assemble(source: str, config: AssemblerConfig | None = None) -> AssemblyResult:
    config = config or AssemblerConfig()
    lines = parse_source(source)
    asm = _Assembly(config)
    pending: list[tuple[str, int]] = []
    for line in lines:
        if line.label:
            pending.append((line.label, line.number))
        if line.mnemonic is None:
            continue
        if line.mnemonic in ("ERASE", "=", "SETLOC", "BANK"):
            if line.label:
                raise AsmError("%s cannot carry a label" % line.mnemonic,
                               line=line.number)
            asm.place(line)
        else:
            line.labels = pending[:]
            pending.clear()
            asm.place(line)
    if pending:
        raise AsmError("label %r never bound to a word" % pending[0][0],
                       line=pending[0][1])
    for line in lines:
        if line.address is not None:
            asm.emit(line)
    banks = {}
    for bank, slots in sorted(asm.words.items()):
        arr = np.full(BANK_WORDS, Word.of(0).packed, dtype=np.uint16)
        for offset, word in slots.items():
            arr[offset] = Word.of(word).packed
        banks[bank] = arr
    image = RopeImage(banks)
    return AssemblyResult(image, asm.symbols, _listing(lines, asm))


def _listing(lines: list[Line], asm: _Assembly) -> str:
    by_line: dict[int, tuple[int, int, int]] = {}
    for line, bank, offset, word in asm.emitted:
        by_line[line.number] = (bank, offset, word)    # instruction after auto-EXTEND
    out = []
    for line in lines:
        if line.number in by_line:
            bank, offset, word = by_line[line.number]
            out.append("%02o %04o  %05o  %s" % (bank, FIXED_WINDOW_BASE + offset,
                                                word, line.text))
        else:
            out.append("%s%s" % (" " * 16, line.text))
    return "\n".join(out) + "\n"


def symbols_text(symbols: dict[str, Symbol]) -> str:
    out = []
    for name in sorted(symbols):
        sym = symbols[name]
        bank = "" if sym.bank is None else " bank=%02o" % sym.bank
        out.append("%-16s %-9s %05o%s" % (name, sym.kind, sym.value, bank))
    return "\n".join(out) + "\n"


def parse_symbols_text(text: str) -> dict[str, Symbol]:
    symbols = {}
    for raw in text.splitlines():
        if not raw.strip():
            continue
        parts = raw.split()
        bank = None
        if len(parts) > 3 and parts[3].startswith("bank="):
            bank = int(parts[3][5:], 8)
        symbols[parts[0]] = Symbol(parts[1], int(parts[2], 8), bank)
    return symbols


def disassemble(image: RopeImage, symbols: dict[str, Symbol] | None = None) -> str:
    """Render an image back to source; reassembling reproduces the image."""
    labels: dict[tuple[int, int], str] = {}
    if symbols:
        for name, sym in symbols.items():
            if sym.kind == "fixed":
                labels[(sym.bank, sym.value - FIXED_WINDOW_BASE)] = name
    out = []
    for bank in sorted(image.banks):
        out.append("SETLOC %o 0" % bank)
        extend = False
        for offset in range(BANK_WORDS):
            word = int(image.banks[bank][offset]) >> 1
            try:
                inst = decode(word, extend)
                if inst.has_operand:
                    stmt = "%-7s %04o" % (inst.mnemonic, inst.operand)
                else:
                    stmt = inst.mnemonic
                extend = inst.mnemonic == "EXTEND"
            except UnimplementedInstruction:
                stmt = "%-7s %05o" % ("OCT", word)
                extend = False
            label = labels.get((bank, offset), "")
            out.append("%s %s" % (label.ljust(7), stmt))
    return "\n".join(out) + "\n"
