"""Banked memory map: central registers, erasable banks, fixed banks.

The 12-bit address space routes as:

    0000-0007  central registers (aliasing erasable bank 0, offsets 0-7)
    0010-1377  unswitched erasable, direct-mapped to banks 0-2
    1400-1777  switched erasable window, bank selected by EB
    2000-3777  switched fixed window, bank selected by FB (+ superbank)

Fixed banks 32-35 sit behind the superbank flag: with it set, FB values
30-33 octal land on them.  Everything at or above 4000 octal is unmapped.
"""

import zlib

import numpy as np

from .channels import ChannelBus, Manifest
from .errors import CorruptWord, ReadOnlyViolation, Unmapped
from .rope import BANK_WORDS, MAX_BANKS, McmGrid, RopeImage, _parity_ok
from .words import Word, check_word

# central register offsets
REG_A = 0o0
REG_L = 0o1
REG_Q = 0o2
REG_EB = 0o3
REG_FB = 0o4
REG_Z = 0o5
REG_BB = 0o6
REG_ZERO = 0o7

UNSWITCHED_TOP = 0o1377
SWITCHED_ERASABLE_BASE = 0o1400
FIXED_WINDOW_BASE = 0o2000
FIXED_WINDOW_TOP = 0o3777
SUPERBANK_FB_BASE = 0o30

CENTRAL = "central"
UNSWITCHED_ERASABLE = "unswitched-erasable"
SWITCHED_ERASABLE = "switched-erasable"
SWITCHED_FIXED = "switched-fixed"

ERASABLE_BANKS = 8
ERASABLE_BANK_WORDS = 256


class BankRegisters:
    """EB/FB/BB bank selects plus the superbank extension flag."""

    def __init__(self):
        self._eb = 0
        self._fb = 0
        self.superbank = False

    @property
    def eb(self) -> int:
        return self._eb

    @eb.setter
    def eb(self, v: int) -> None:
        self._eb = v & 0o7

    @property
    def fb(self) -> int:
        return self._fb

    @fb.setter
    def fb(self, v: int) -> None:
        self._fb = v & 0o37

    @property
    def bb(self) -> int:
        return (self._fb << 3) | self._eb

    @bb.setter
    def bb(self, v: int) -> None:
        self._fb = (v >> 3) & 0o37
        self._eb = v & 0o7


class ResolvedLocation:
    """Where a 12-bit address lands: region plus bank/offset indices."""

    __slots__ = ("region", "bank", "offset")

    def __init__(self, region: str, bank: int, offset: int):
        self.region = region
        self.bank = bank
        self.offset = offset

    def __eq__(self, other):
        return (self.region, self.bank, self.offset) == \
               (other.region, other.bank, other.offset)

    def __repr__(self):
        return "ResolvedLocation(%s, bank=%d, offset=%03o)" % (
            self.region, self.bank, self.offset)


def resolve(addr: int, regs: BankRegisters) -> ResolvedLocation:
    """Route a 12-bit address; raises Unmapped outside every window."""
    if not 0 <= addr < 0o10000:
        raise Unmapped(addr)
    if addr <= REG_ZERO:
        return ResolvedLocation(CENTRAL, 0, addr)
    if addr <= UNSWITCHED_TOP:
        return ResolvedLocation(UNSWITCHED_ERASABLE, addr >> 8, addr & 0o377)
    if addr < FIXED_WINDOW_BASE:
        offset = addr - SWITCHED_ERASABLE_BASE
        if regs.eb == 0 and offset <= REG_ZERO:
            return ResolvedLocation(CENTRAL, 0, offset)
        return ResolvedLocation(SWITCHED_ERASABLE, regs.eb, offset)
    if addr <= FIXED_WINDOW_TOP:
        bank = regs.fb
        if regs.superbank and bank >= SUPERBANK_FB_BASE:
            bank += 8
        return ResolvedLocation(SWITCHED_FIXED, bank, addr - FIXED_WINDOW_BASE)
    raise Unmapped(addr)


class ArrayErasable:
    """Plain-array erasable store (packed words, +0 with odd parity)."""

    def __init__(self):
        self.words = np.full((ERASABLE_BANKS, ERASABLE_BANK_WORDS), 1, dtype=np.uint16)

    def get(self, bank: int, offset: int) -> int:
        return int(self.words[bank, offset])

    def set(self, bank: int, offset: int, packed: int) -> None:
        self.words[bank, offset] = packed


class McmErasable:
    """Erasable store backed by magnetic-core grids, one per bank.

    Word bit 15 (of the packed layout) maps to grid column 0; every word
    read performs 16 destructive-read/rewrite cycles.
    """

    def __init__(self):
        self.grids = [McmGrid(ERASABLE_BANK_WORDS, 16) for _ in range(ERASABLE_BANKS)]
        for g in self.grids:
            g.polarity[:, 15] = 1    # packed +0: data 0, parity 1

    def get(self, bank: int, offset: int) -> int:
        g = self.grids[bank]
        packed = 0
        for col in range(16):
            packed = (packed << 1) | g.read(offset, col)
        return packed

    def set(self, bank: int, offset: int, packed: int) -> None:
        g = self.grids[bank]
        for col in range(16):
            g.write(offset, col, (packed >> (15 - col)) & 1)

    @property
    def rewrite_cycles(self) -> int:
        return sum(g.rewrite_cycles for g in self.grids)


class MemorySystem:
    """All addressable storage plus the channel bus reference."""

    def __init__(self, channels: ChannelBus | None = None,
                 manifest: Manifest | None = None,
                 strict_parity: bool = True,
                 erasable_store=None):
        self.channels = channels if channels is not None else ChannelBus(manifest)
        self.manifest = self.channels.manifest
        self.strict_parity = strict_parity
        self.erasable = erasable_store if erasable_store is not None else ArrayErasable()
        self.fixed: dict[int, np.ndarray] = {}
        self.bank_regs = BankRegisters()
        sb = self.manifest.channels.get("SUPERBNK")
        if sb is not None:
            self.channels.attach_device(sb, on_write=self._superbank_hook)

    def _superbank_hook(self, value: int):
        self.bank_regs.superbank = bool(value & 1)
        return value

    # --- raw access (fault injection, dumps, display peeks) ---

    def peek_raw(self, addr: int) -> int:
        loc = resolve(addr, self.bank_regs)
        if loc.region == CENTRAL:
            return Word.of(self._central_read(loc.offset)).packed
        if loc.region == SWITCHED_FIXED:
            return int(self._fixed_word(loc, addr))
        return self.erasable.get(loc.bank, loc.offset)

    def poke_raw(self, addr: int, packed: int) -> None:
        """Test backdoor: store a packed word verbatim, even into fixed."""
        loc = resolve(addr, self.bank_regs)
        if loc.region == SWITCHED_FIXED:
            self.fixed[loc.bank][loc.offset] = packed
        else:
            self.erasable.set(loc.bank, loc.offset, packed)

    # --- central registers ---

    def _central_read(self, offset: int) -> int:
        if offset == REG_ZERO:
            return 0
        if offset == REG_EB:
            return self.bank_regs.eb
        if offset == REG_FB:
            return self.bank_regs.fb
        if offset == REG_BB:
            return self.bank_regs.bb
        return (self.erasable.get(0, offset) >> 1) & 0o77777

    def _central_write(self, offset: int, data: int) -> None:
        if offset == REG_ZERO:
            return
        if offset == REG_EB:
            self.bank_regs.eb = data
        elif offset == REG_FB:
            self.bank_regs.fb = data
        elif offset == REG_BB:
            self.bank_regs.bb = data
        else:
            self.erasable.set(0, offset, Word.of(data).packed)

    # --- the spec surface ---

    def read(self, addr: int) -> Word:
        mirror = self.manifest.mirrors.get(addr)
        if mirror is not None:
            return Word.of(self.channels.read(mirror))
        loc = resolve(addr, self.bank_regs)
        if loc.region == CENTRAL:
            return Word.of(self._central_read(loc.offset))
        if loc.region == SWITCHED_FIXED:
            w = Word.from_packed(int(self._fixed_word(loc, addr)))
        else:
            w = Word.from_packed(self.erasable.get(loc.bank, loc.offset))
        if self.strict_parity:
            try:
                check_word(w)
            except CorruptWord:
                raise CorruptWord("corrupt word at %05o" % addr, address=addr,
                                  bank=loc.bank, offset=loc.offset) from None
        return w

    def write(self, addr: int, value) -> None:
        data = value.data if isinstance(value, Word) else value
        mirror = self.manifest.mirrors.get(addr)
        if mirror is not None:
            self.channels.write(mirror, data)
            return
        loc = resolve(addr, self.bank_regs)
        if loc.region == SWITCHED_FIXED:
            raise ReadOnlyViolation(addr)
        if loc.region == CENTRAL:
            self._central_write(loc.offset, data & 0o77777)
        else:
            self.erasable.set(loc.bank, loc.offset, Word.of(data).packed)

    def _fixed_word(self, loc: ResolvedLocation, addr: int):
        bank = self.fixed.get(loc.bank)
        if bank is None:
            raise Unmapped(addr)
        return bank[loc.offset]

    def load_rope(self, image: RopeImage) -> None:
        """Populate fixed storage; bad parity reports its bank/offset."""
        image.validate(check_parity=False)
        for bank_id in sorted(image.banks):
            words = image.banks[bank_id]
            bad = np.nonzero(~_parity_ok(words))[0]
            if bad.size:
                off = int(bad[0])
                raise CorruptWord(
                    "rope bank %d offset %04o fails parity" % (bank_id, off),
                    bank=bank_id, offset=off)
        self.fixed = {b: image.banks[b].copy() for b in image.banks}

    # --- helpers for tests and the executive ---

    def fixed_checksum(self) -> int:
        crc = 0
        for bank_id in sorted(self.fixed):
            crc = zlib.crc32(self.fixed[bank_id].tobytes(), crc)
        return crc

    def erasable_snapshot(self) -> list[int]:
        """All 2048 packed erasable words, central views materialized."""
        out = []
        for bank in range(ERASABLE_BANKS):
            for off in range(ERASABLE_BANK_WORDS):
                if bank == 0 and off <= REG_ZERO:
                    out.append(Word.of(self._central_read(off)).packed)
                else:
                    out.append(self.erasable.get(bank, off))
        return out
