"""Core-rope weave plans, the .rope image container, and the MCM grid.

A weave plan is the logical through/around matrix of a rope module: one
sense line per stored word, one core per bit position, wire-through-core
meaning 1.  The .rope container serializes fixed memory bank-by-bank in a
bit-exact layout so independently produced images interoperate.
"""

import io
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import BadImage, OutOfGrid, TooManyLines, WidthMismatch

MAX_LINES_PER_CORE = 24      # physical wiring limit per core
MAX_BANKS = 36
BANK_WORDS = 1024
ROPE_MAGIC = b"AGCROPE1"

THROUGH = "through"
AROUND = "around"


@dataclass
class WeavePlan:
    """through/around matrix: passes[line][core], core 0 = most significant."""

    cores: int
    passes: np.ndarray      # bool, shape (lines, cores); True = through

    @property
    def lines(self) -> int:
        return self.passes.shape[0]


def weave(words, cores_per_group: int) -> WeavePlan:
    """Plan the wiring for one core group, one line per word."""
    if len(words) > MAX_LINES_PER_CORE:
        raise TooManyLines("%d lines on one core group (limit %d)"
                           % (len(words), MAX_LINES_PER_CORE))
    limit = 1 << cores_per_group
    passes = np.zeros((len(words), cores_per_group), dtype=bool)
    for i, w in enumerate(words):
        if not 0 <= w < limit:
            raise WidthMismatch("word %o does not fit %d cores" % (w, cores_per_group))
        for j in range(cores_per_group):
            passes[i, j] = bool((w >> (cores_per_group - 1 - j)) & 1)
    return WeavePlan(cores_per_group, passes)


def readout(plan: WeavePlan) -> list[int]:
    """Sense every line of the plan back into word values."""
    out = []
    for i in range(plan.lines):
        w = 0
        for j in range(plan.cores):
            w = (w << 1) | int(plan.passes[i, j])
        out.append(w)
    return out


def plan_to_csv(plan: WeavePlan) -> str:
    rows = ["line,core,state"]
    for i in range(plan.lines):
        for j in range(plan.cores):
            rows.append("%d,%d,%s" % (i, j, THROUGH if plan.passes[i, j] else AROUND))
    return "\n".join(rows) + "\n"


def plan_from_csv(text: str) -> WeavePlan:
    entries = {}
    lines = text.strip().splitlines()
    if not lines or lines[0] != "line,core,state":
        raise BadImage("weave CSV missing 'line,core,state' header")
    for row in lines[1:]:
        i, j, state = row.split(",")
        entries[(int(i), int(j))] = state == THROUGH
    n_lines = 1 + max(k[0] for k in entries) if entries else 0
    n_cores = 1 + max(k[1] for k in entries) if entries else 0
    passes = np.zeros((n_lines, n_cores), dtype=bool)
    for (i, j), through in entries.items():
        passes[i, j] = through
    return WeavePlan(n_cores, passes)


# --- .rope container ---------------------------------------------------------

def _parity_ok(words: np.ndarray) -> np.ndarray:
    """Boolean mask of words whose 16-bit 1-count is odd."""
    return np.bitwise_count(words.astype(np.uint16)) % 2 == 1


@dataclass
class RopeImage:
    """Fixed-memory contents: bank id -> 1024 packed (data<<1|parity) words."""

    banks: dict[int, np.ndarray] = field(default_factory=dict)

    def validate(self, check_parity: bool = True) -> None:
        if len(self.banks) > MAX_BANKS:
            raise BadImage("%d banks exceeds the %d-bank rope" % (len(self.banks), MAX_BANKS))
        for bank_id, words in self.banks.items():
            if not 0 <= bank_id < MAX_BANKS:
                raise BadImage("bank id %d out of range" % bank_id)
            if words.shape != (BANK_WORDS,):
                raise BadImage("bank %d holds %d words, want %d"
                               % (bank_id, words.shape[0], BANK_WORDS))
            if check_parity:
                bad = np.nonzero(~_parity_ok(words))[0]
                if bad.size:
                    raise BadImage("bank %d offset %04o fails parity" % (bank_id, bad[0]))


def image_from_banks(image: RopeImage) -> bytes:
    """Serialize to the container layout (all fields big-endian)."""
    image.validate()
    buf = io.BytesIO()
    buf.write(ROPE_MAGIC)
    buf.write(struct.pack(">H", len(image.banks)))
    for bank_id in sorted(image.banks):
        buf.write(struct.pack(">H", bank_id))
        buf.write(image.banks[bank_id].astype(">u2").tobytes())
    return buf.getvalue()


def banks_from_image(data: bytes) -> RopeImage:
    """Parse and validate a serialized rope image."""
    if len(data) < len(ROPE_MAGIC) + 2 or data[:8] != ROPE_MAGIC:
        raise BadImage("bad magic; not a rope image")
    (bank_count,) = struct.unpack_from(">H", data, 8)
    if bank_count > MAX_BANKS:
        raise BadImage("header declares %d banks (limit %d)" % (bank_count, MAX_BANKS))
    pos = 10
    banks = {}
    prev = -1
    for _ in range(bank_count):
        if pos + 2 + 2 * BANK_WORDS > len(data):
            raise BadImage("truncated bank record")
        (bank_id,) = struct.unpack_from(">H", data, pos)
        if bank_id <= prev:
            raise BadImage("bank ids not strictly increasing at %d" % bank_id)
        prev = bank_id
        pos += 2
        words = np.frombuffer(data, dtype=">u2", count=BANK_WORDS, offset=pos)
        banks[bank_id] = words.astype(np.uint16)
        pos += 2 * BANK_WORDS
    if pos != len(data):
        raise BadImage("%d trailing bytes after last bank" % (len(data) - pos))
    image = RopeImage(banks)
    image.validate()
    return image


# --- rope <-> weave CSV ------------------------------------------------------

def rope_to_weave_csv(image: RopeImage) -> str:
    """Weave every bank as groups of up to 24 packed 16-bit words."""
    image.validate()
    rows = ["bank,group,line,core,state"]
    for bank_id in sorted(image.banks):
        words = image.banks[bank_id]
        for g in range(0, BANK_WORDS, MAX_LINES_PER_CORE):
            plan = weave([int(w) for w in words[g:g + MAX_LINES_PER_CORE]], 16)
            group = g // MAX_LINES_PER_CORE
            for i in range(plan.lines):
                for j in range(plan.cores):
                    state = THROUGH if plan.passes[i, j] else AROUND
                    rows.append("%d,%d,%d,%d,%s" % (bank_id, group, i, j, state))
    return "\n".join(rows) + "\n"


def weave_csv_to_rope(text: str) -> RopeImage:
    lines = text.strip().splitlines()
    if not lines or lines[0] != "bank,group,line,core,state":
        raise BadImage("weave CSV missing 'bank,group,line,core,state' header")
    banks: dict[int, np.ndarray] = {}
    for row in lines[1:]:
        bank, group, line, core, state = row.split(",")
        words = banks.setdefault(int(bank), np.zeros(BANK_WORDS, dtype=np.uint16))
        idx = int(group) * MAX_LINES_PER_CORE + int(line)
        if state == THROUGH:
            words[idx] |= 1 << (15 - int(core))
    image = RopeImage(banks)
    image.validate()
    return image


# --- magnetic-core grid ------------------------------------------------------

class McmGrid:
    """Row/column-addressed core grid; reads are destructive then rewritten."""

    def __init__(self, rows: int, cols: int):
        self.rows = rows
        self.cols = cols
        self.polarity = np.zeros((rows, cols), dtype=np.uint8)
        self.rewrite_cycles = 0

    def _check(self, r: int, c: int) -> None:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise OutOfGrid("(%d, %d) outside %dx%d grid" % (r, c, self.rows, self.cols))

    def read(self, r: int, c: int) -> int:
        self._check(r, c)
        bit = int(self.polarity[r, c])
        self.polarity[r, c] = 0          # sense pulse flips the core
        self.polarity[r, c] = bit        # rewrite pass restores it
        self.rewrite_cycles += 1
        return bit

    def write(self, r: int, c: int, bit: int) -> None:
        self._check(r, c)
        self.polarity[r, c] = 1 if bit else 0
