"""Memory-mapped channel bus and the channel/layout manifest.

Channels are a 512-entry latch space distinct from erasable addresses;
READ/WRITE/RAND take channel operands.  The manifest assigns symbolic
names to channel ids, DSKY lamp bits, named erasable cells, and the
protected erasable ranges that survive a restart.
"""

from dataclasses import dataclass, field
from importlib import resources

from .errors import AlreadyAttached, BadChannel

NUM_CHANNELS = 512
ENGINE_ON_MASK = 0o20000     # the engine-control bit of DSALMOUT


@dataclass
class Manifest:
    channels: dict[str, int] = field(default_factory=dict)
    lamps: dict[str, int] = field(default_factory=dict)      # name -> bit number
    cells: dict[str, int] = field(default_factory=dict)      # name -> erasable addr
    protect: list[tuple[int, int]] = field(default_factory=list)
    mirrors: dict[int, int] = field(default_factory=dict)    # erasable addr -> channel

    def protected(self, addr: int) -> bool:
        return any(lo <= addr <= hi for lo, hi in self.protect)


def parse_manifest(text: str) -> Manifest:
    """Parse the line-oriented manifest; numbers are octal except lamp bits."""
    m = Manifest()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "channel":
                m.channels[parts[1]] = int(parts[2], 8)
            elif kind == "lamp":
                m.lamps[parts[1]] = int(parts[2])
            elif kind == "cell":
                m.cells[parts[1]] = int(parts[2], 8)
            elif kind == "protect":
                m.protect.append((int(parts[1], 8), int(parts[2], 8)))
            elif kind == "mirror":
                m.mirrors[int(parts[1], 8)] = int(parts[2], 8)
            else:
                raise ValueError("unknown entry %r" % kind)
        except (IndexError, ValueError) as exc:
            raise ValueError("manifest line %d: %s" % (lineno, exc)) from exc
    return m


def default_manifest() -> Manifest:
    text = resources.files("agcsim.data").joinpath("channels.manifest").read_text()
    return parse_manifest(text)


class ChannelBus:
    """512 latches plus optional per-channel device hooks."""

    def __init__(self, manifest: Manifest | None = None):
        self.manifest = manifest if manifest is not None else default_manifest()
        self.latches = [0] * NUM_CHANNELS
        self._hooks: dict[int, tuple] = {}

    def _check(self, ch: int) -> None:
        if not 0 <= ch < NUM_CHANNELS:
            raise BadChannel("channel %o outside the %d-channel bus" % (ch, NUM_CHANNELS))

    def read(self, ch: int) -> int:
        self._check(ch)
        value = self.latches[ch]
        hook = self._hooks.get(ch)
        if hook and hook[0] is not None:
            value = hook[0](value) & 0o77777
        return value

    def write(self, ch: int, value: int) -> None:
        self._check(ch)
        value &= 0o77777
        hook = self._hooks.get(ch)
        if hook and hook[1] is not None:
            replaced = hook[1](value)
            if replaced is not None:
                value = replaced & 0o77777
        self.latches[ch] = value

    def attach_device(self, ch: int, on_read=None, on_write=None) -> None:
        """Register read/write callbacks; they persist until reset()."""
        self._check(ch)
        if ch in self._hooks:
            raise AlreadyAttached("channel %o already has a device" % ch)
        self._hooks[ch] = (on_read, on_write)

    def reset(self) -> None:
        self.latches = [0] * NUM_CHANNELS
        self._hooks.clear()

    @property
    def engine_on(self) -> bool:
        ch = self.manifest.channels.get("DSALMOUT")
        return ch is not None and bool(self.latches[ch] & ENGINE_ON_MASK)
