"""Error types shared across the emulator suite.

The machine-fault classes (CorruptWord, Unmapped, UnimplementedInstruction)
double as alarm sources: the executive maps them to alarm codes when they
escape the step loop.
"""


class AgcError(Exception):
    """Base class for every fault raised by this package."""


# --- machine faults ---------------------------------------------------------

class CorruptWord(AgcError):
    """Even 1-count in a stored word: simulated memory corruption."""

    def __init__(self, message, address=None, bank=None, offset=None):
        super().__init__(message)
        self.address = address
        self.bank = bank
        self.offset = offset


class Unmapped(AgcError):
    """Address outside every defined memory window."""

    def __init__(self, address):
        super().__init__("address %05o is not mapped" % address)
        self.address = address


class ReadOnlyViolation(AgcError):
    """Write attempt into fixed (rope) storage."""

    def __init__(self, address):
        super().__init__("address %05o is in read-only fixed memory" % address)
        self.address = address


class UnimplementedInstruction(AgcError):
    """Valid historical opcode outside the implemented subset."""

    def __init__(self, raw, extended=False):
        kind = "extended " if extended else ""
        super().__init__("%sword %05o decodes to an unimplemented instruction"
                         % (kind, raw))
        self.raw = raw
        self.extended = extended


# --- channel bus -------------------------------------------------------------

class BadChannel(AgcError):
    """Channel id outside the 512-entry bus."""


class AlreadyAttached(AgcError):
    """A device hook is already registered on the channel."""


# --- container / codec -------------------------------------------------------

class BadImage(AgcError):
    """Malformed rope image container."""


# --- assembler ---------------------------------------------------------------

class AsmError(AgcError):
    """Base for assembly-time failures; carries the source line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


class UnknownMnemonic(AsmError):
    pass


class UndefinedSymbol(AsmError):
    pass


class DuplicateLabel(AsmError):
    pass


class BankOverflow(AsmError):
    """Emission ran past the 1024-word end of a fixed bank."""


class OperandRange(AsmError):
    """Operand not encodable for the mnemonic (also raised by encode())."""


# --- rope / weave / grid -----------------------------------------------------

class TooManyLines(AgcError):
    """More than 24 sense lines routed through one core group."""


class WidthMismatch(AgcError):
    """Word does not fit the core-group width."""


class OutOfGrid(AgcError):
    """Row/column outside the core grid."""
