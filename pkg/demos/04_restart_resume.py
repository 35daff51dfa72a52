"""Survive a mid-flight restart.

The ignition routine commits each phase to the protected phase table
before running it.  Halfway through we trash the scratch erasable area
(the radar-dish incident, in miniature) and restart: the machine dumps
its memory, clears scratch, reboots, and resumes at the committed phase.
The final committed state matches an uninterrupted run exactly.
"""

import random
from pathlib import Path

from agcsim import ExecConfig, Executive, MachineState, MemorySystem, assemble, run
from agcsim.words import Word

SOURCE = (Path(__file__).parent.parent / "tests" / "fixtures"
          / "restart_ignition.agc").read_text()


def fresh():
    result = assemble(SOURCE)
    mem = MemorySystem()
    mem.load_rope(result.image)
    state = MachineState(mem)
    ex = Executive(mem, state, config=ExecConfig(alarm_policy="halt"))
    for name, pair in (("TIME2", (5, 100)), ("TGO", (2, 300))):
        addr = result.symbols[name].value
        mem.write(addr, pair[0])
        mem.write(addr + 1, pair[1])
    return result.symbols, mem, state, ex


def committed(mem, syms):
    return {name: mem.read(syms[name].value).data
            for name in ("FLAGWRD5", "TEVENT", "TIG")}


# run one: uninterrupted
syms, mem, state, _ = fresh()
run(state, limit=5000)
clean = committed(mem, syms)
print("uninterrupted:", {k: "%05o" % v for k, v in clean.items()})

# run two: corrupt scratch at the phase-3 boundary, then restart
syms, mem, state, ex = fresh()
boundary = syms["PH3"].value
run(state, limit=5000, breakpoints={boundary})
print("hit phase 3 boundary at %04o, corrupting scratch..." % boundary)
rng = random.Random(7)
for bank in range(8):
    for off in range(256):
        linear = bank * 256 + off
        if linear <= 7 or mem.manifest.protected(linear):
            continue
        mem.erasable.set(bank, off, Word.of(rng.randrange(0x8000)).packed)
ex.restart()
print("restarted; dump artifact is %d bytes; resuming at %04o"
      % (len(ex.dumps[-1]), state.z))
run(state, limit=5000)
resumed = committed(mem, syms)
print("after restart:", {k: "%05o" % v for k, v in resumed.items()})
print("identical to uninterrupted run:", resumed == clean)
