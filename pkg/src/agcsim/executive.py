"""Minimal Executive: verb/noun dispatch, alarms, and restart-with-resume.

The DSKY entry machine accepts the protocol key codes: digits, "V" (VERB),
"N" (NOUN), "E" (ENTR), "C" (CLR), "R" (RSET), "K" (KEY-REL), "+", "-".
Programs opt into restart protection by writing, per restart group, a
resume address followed by a nonzero phase id into the phase-table region;
the phase-id write is the commit.
"""

import json
import struct
import time
from dataclasses import dataclass, field
from importlib import resources

from .cpu import BOOT_ENTRY, MachineState, run
from .errors import (
    CorruptWord,
    ReadOnlyViolation,
    UnimplementedInstruction,
    Unmapped,
)
from .memory import ERASABLE_BANK_WORDS, ERASABLE_BANKS, REG_ZERO, MemorySystem
from .words import MAX_MAGNITUDE, oc_complement

DUMP_MAGIC = b"AGCDUMP1"
RESTART_GROUPS = 4

ALARM_CODES = {
    ReadOnlyViolation: 0o1104,
    UnimplementedInstruction: 0o1105,
    Unmapped: 0o1106,
    CorruptWord: 0o1107,
}
ALARM_FALLBACK = 0o1777

KEYS = frozenset("0123456789") | {"V", "N", "E", "C", "R", "K", "+", "-"}


@dataclass
class NounDef:
    addresses: list[int]
    scale: str = "octal"


@dataclass
class VerbNounTable:
    verbs: dict[int, str] = field(default_factory=dict)
    nouns: dict[int, NounDef] = field(default_factory=dict)
    programs: dict[int, int] = field(default_factory=dict)

    @classmethod
    def from_json(cls, text: str) -> "VerbNounTable":
        raw = json.loads(text)
        table = cls()
        for vid, kind in raw.get("verbs", {}).items():
            if kind not in ("monitor", "load", "lamp-test", "change-program"):
                raise ValueError("verb %s has unknown kind %r" % (vid, kind))
            table.verbs[int(vid)] = kind
        for nid, nd in raw.get("nouns", {}).items():
            addresses = [int(a, 8) for a in nd["addresses"]]
            for addr in addresses:
                if not 0 <= addr < 0o2000:
                    raise ValueError("noun %s address %o is not erasable" % (nid, addr))
            table.nouns[int(nid)] = NounDef(addresses, nd.get("scale", "octal"))
        for pid, entry in raw.get("programs", {}).items():
            table.programs[int(pid)] = int(entry, 8)
        return table


def default_table() -> VerbNounTable:
    text = resources.files("agcsim.data").joinpath("verbs.json").read_text()
    return VerbNounTable.from_json(text)


def format_display(pattern: int, scale: str = "octal") -> str:
    """Sign plus five digits, the DSKY register rendering."""
    negative = bool(pattern & 0o40000)
    mag = oc_complement(pattern) if negative else pattern
    digits = "%05o" % mag if scale == "octal" else "%05d" % mag
    return ("-" if negative else "+") + digits


class DskyState:
    """Lamps, PROG/VERB/NOUN digits, R1-R3, and the key-entry machine."""

    def __init__(self, lamp_names):
        self.lamps = {name: False for name in lamp_names}
        self.prog = "00"
        self.verb = "00"
        self.noun = "00"
        self.r = [None, None, None]
        self.mode = "idle"            # idle | verb | noun | data
        self.pending = ""
        self.data_sign = "+"
        self.data_digits = ""
        self.data_component = 0
        self.committed_verb = None
        self.committed_noun = None

    def restore_displays(self) -> None:
        self.verb = "%02d" % self.committed_verb if self.committed_verb is not None else "00"
        self.noun = "%02d" % self.committed_noun if self.committed_noun is not None else "00"


@dataclass
class ExecConfig:
    alarm_policy: str = "restart"     # restart | skip | halt
    lamp_test_s: float = 2.0
    dump_path: str | None = None
    boot: int = BOOT_ENTRY
    tick_cycles: int = 500
    trace_hook: object = None         # callable(StepReport), fed by the server


DEFAULT_LAMPS = ("STANDBY", "UPLINK", "KEY-REL", "OPR-ERR", "TEMP",
                 "GIMBAL-LOCK", "PROG-ALARM", "RESTART", "ENGINE-ON")


class Executive:
    """Owns the machine, the DSKY, and the restart discipline."""

    def __init__(self, mem: MemorySystem, state: MachineState | None = None,
                 table: VerbNounTable | None = None,
                 config: ExecConfig | None = None):
        self.mem = mem
        self.state = state if state is not None else MachineState(mem)
        self.table = table if table is not None else default_table()
        self.config = config if config is not None else ExecConfig()
        lamps = tuple(mem.manifest.lamps) or DEFAULT_LAMPS
        self.dsky = DskyState(lamps)
        self.monitor_noun = None
        self.lamp_test_until = 0.0
        self.paused = False
        self.dumps: list[bytes] = []
        self.alarm_cell = mem.manifest.cells.get("ALARMCODE")
        self.phase_base = mem.manifest.cells.get("PHASETBL", 0o40)

    # --- key entry ------------------------------------------------------

    def operator_error(self) -> None:
        self.dsky.lamps["OPR-ERR"] = True
        self.dsky.mode = "idle"
        self.dsky.pending = ""
        self.dsky.restore_displays()

    def key_in(self, k: str) -> DskyState:
        d = self.dsky
        if k not in KEYS:
            raise ValueError("unknown key %r" % k)
        keych = self.mem.manifest.channels.get("DSKYKEYS")
        if keych is not None:
            self.mem.channels.write(keych, ord(k))
        if k == "C":
            d.mode = "idle"
            d.pending = ""
            d.data_digits = ""
            d.data_sign = "+"
            d.restore_displays()
        elif k == "R":
            for lamp in ("PROG-ALARM", "OPR-ERR", "RESTART"):
                if lamp in d.lamps:
                    d.lamps[lamp] = False
        elif k == "K":
            if "KEY-REL" in d.lamps:
                d.lamps["KEY-REL"] = False
        elif k == "V":
            d.mode = "verb"
            d.pending = ""
            d.verb = ""
        elif k == "N":
            if d.mode == "verb":
                if not d.pending:
                    self.operator_error()
                    self._sync_lamps()
                    return d
                d.committed_verb = int(d.pending, 10)
                d.verb = "%02d" % d.committed_verb
            d.mode = "noun"
            d.pending = ""
            d.noun = ""
        elif k in "0123456789":
            self._digit(k)
        elif k in "+-":
            if d.mode == "data":
                d.data_sign = k
                d.r[d.data_component] = d.data_sign + d.data_digits
            else:
                self.operator_error()
        elif k == "E":
            self._enter()
        self._sync_lamps()
        return d

    def _digit(self, k: str) -> None:
        d = self.dsky
        if d.mode in ("verb", "noun"):
            if len(d.pending) >= 2:
                self.operator_error()
                return
            d.pending += k
            if d.mode == "verb":
                d.verb = d.pending
            else:
                d.noun = d.pending
        elif d.mode == "data":
            if len(d.data_digits) >= 5:
                self.operator_error()
                return
            d.data_digits += k
            d.r[d.data_component] = d.data_sign + d.data_digits
        else:
            self.operator_error()

    def _enter(self) -> None:
        d = self.dsky
        if d.mode == "verb":
            if not d.pending:
                self.operator_error()
                return
            d.committed_verb = int(d.pending, 10)
            d.verb = "%02d" % d.committed_verb
            d.mode = "idle"
            d.pending = ""
            self.schedule(d.committed_verb, d.committed_noun)
        elif d.mode == "noun":
            if not d.pending:
                self.operator_error()
                return
            d.committed_noun = int(d.pending, 10)
            d.noun = "%02d" % d.committed_noun
            d.mode = "idle"
            d.pending = ""
            if d.committed_verb is None:
                self.operator_error()
                return
            self.schedule(d.committed_verb, d.committed_noun)
        elif d.mode == "data":
            self._commit_data()
        else:
            self.operator_error()

    def _commit_data(self) -> None:
        d = self.dsky
        noun = self.table.nouns[d.committed_noun]
        base = 8 if noun.scale == "octal" else 10
        try:
            mag = int(d.data_digits or "0", base)
        except ValueError:
            self.operator_error()
            return
        if mag > MAX_MAGNITUDE:
            self.operator_error()
            return
        pattern = oc_complement(mag) if d.data_sign == "-" else mag
        self.mem.write(noun.addresses[d.data_component], pattern)
        d.r[d.data_component] = format_display(pattern, noun.scale)
        d.data_component += 1
        d.data_digits = ""
        d.data_sign = "+"
        if d.data_component >= min(len(noun.addresses), 3):
            d.mode = "idle"
            d.data_component = 0

    # --- verb dispatch ----------------------------------------------------

    def schedule(self, verb: int, noun: int | None) -> bool:
        """Dispatch a verb/noun pair; unknown ids light OPR-ERR."""
        d = self.dsky
        kind = self.table.verbs.get(verb)
        if kind is None:
            self.operator_error()
            return False
        if kind == "lamp-test":
            self.lamp_test_until = time.monotonic() + self.config.lamp_test_s
            return True
        if kind in ("monitor", "load") and noun not in self.table.nouns:
            self.operator_error()
            return False
        if kind == "monitor":
            self.monitor_noun = noun
            self.refresh_monitor()
            return True
        if kind == "load":
            d.mode = "data"
            d.data_digits = ""
            d.data_sign = "+"
            d.data_component = 0
            return True
        if kind == "change-program":
            entry = self.table.programs.get(noun)
            if entry is None:
                self.operator_error()
                return False
            d.prog = "%02d" % noun
            st = self.state
            st.z = entry
            st.halted = False
            st.alarm = None
            st.extend_pending = False
            st.index_pending = None
            return True
        return False

    # --- display refresh ---------------------------------------------------

    def _peek(self, addr: int) -> int:
        return (self.mem.peek_raw(addr) >> 1) & 0o77777

    def refresh_monitor(self) -> None:
        noun = self.table.nouns.get(self.monitor_noun)
        if noun is None:
            return
        d = self.dsky
        if d.mode == "data":
            return                      # operator owns the registers
        for i in range(3):
            if i < len(noun.addresses):
                d.r[i] = format_display(self._peek(noun.addresses[i]), noun.scale)
            else:
                d.r[i] = None

    def _sync_lamps(self) -> None:
        ch = self.mem.manifest.channels.get("DSKYLAMPS")
        if ch is None:
            return
        latch = 0
        for name, bit in self.mem.manifest.lamps.items():
            if self.dsky.lamps.get(name):
                latch |= 1 << (bit - 1)
        self.mem.channels.latches[ch] = latch & 0o77777

    # --- alarms and restart --------------------------------------------------

    def raise_alarm(self, code: int) -> None:
        self.dsky.lamps["PROG-ALARM"] = True
        if self.alarm_cell is not None:
            self.mem.write(self.alarm_cell, code & 0o77777)
        self._sync_lamps()

    def alarm_code(self) -> int:
        return self._peek(self.alarm_cell) if self.alarm_cell is not None else 0

    def _handle_alarm(self, error: Exception) -> None:
        self.raise_alarm(ALARM_CODES.get(type(error), ALARM_FALLBACK))
        policy = self.config.alarm_policy
        if policy == "restart":
            self.restart()
        elif policy == "skip":
            self.state.z = (self.state.z + 1) & 0o7777
            self.state.alarm = None
        else:
            self.state.halted = True

    def dump_bytes(self) -> bytes:
        """AGCDUMP1 artifact: cycles, 2048 erasable words, 512 latches."""
        out = bytearray(DUMP_MAGIC)
        out += struct.pack(">Q", self.state.cycles)
        for packed in self.mem.erasable_snapshot():
            out += struct.pack(">H", packed)
        for latch in self.mem.channels.latches:
            out += struct.pack(">H", latch)
        return bytes(out)

    def restart(self) -> None:
        """Dump, clear scratch, reset the CPU, resume from the phase table."""
        dump = self.dump_bytes()
        self.dumps.append(dump)
        if self.config.dump_path:
            path = self.config.dump_path
            if "%d" in path:
                path = path % len(self.dumps)
            with open(path, "wb") as fh:
                fh.write(dump)
        for bank in range(ERASABLE_BANKS):
            for off in range(ERASABLE_BANK_WORDS):
                linear = bank * ERASABLE_BANK_WORDS + off
                if linear <= REG_ZERO or self.mem.manifest.protected(linear):
                    continue
                self.mem.erasable.set(bank, off, 1)      # packed +0
        self.state.reset(self.config.boot)
        self.state.alarm = None
        self.dsky.lamps["RESTART"] = True
        for group in range(RESTART_GROUPS):
            phase = self._peek(self.phase_base + 2 * group)
            if phase not in (0, 0o77777):
                resume = self._peek(self.phase_base + 2 * group + 1)
                self.state.z = resume & 0o7777
                break
        else:
            self.state.halted = True                     # empty table: idle
        self._sync_lamps()

    # --- the session pump -------------------------------------------------

    def tick(self, cycles: int | None = None) -> None:
        """One scheduling slice: run the CPU, mirror lamps, refresh displays."""
        if not self.paused and not self.state.halted:
            outcome = run(self.state, limit=cycles or self.config.tick_cycles,
                          trace=self.config.trace_hook)
            if outcome.reason == "alarm":
                self._handle_alarm(outcome.error)
        self.dsky.lamps["ENGINE-ON"] = self.mem.channels.engine_on
        self.refresh_monitor()
        self._sync_lamps()

    def snapshot(self) -> dict:
        d = self.dsky
        lamps = dict(d.lamps)
        if time.monotonic() < self.lamp_test_until:
            lamps = {name: True for name in lamps}
        return {
            "type": "dsky",
            "prog": d.prog, "verb": d.verb, "noun": d.noun,
            "r1": d.r[0], "r2": d.r[1], "r3": d.r[2],
            "lamps": lamps,
            "cycle": self.state.cycles,
        }
