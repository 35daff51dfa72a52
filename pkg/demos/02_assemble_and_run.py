"""Assemble the engine-ignition routine and watch it run.

The two-pass assembler turns the dialect into a rope image; the emulator
boots at 2000 octal and the trace shows every step.  Afterwards the
engine-control channel has its control bit set and TIG holds TGO+TIME2.
"""

from agcsim import MachineState, MemorySystem, assemble, run, trace_line

SOURCE = """
        = DSALMOUT 11
        ERASE FLAGWRD5
        ERASE TEVENT 2
        ERASE TIG 2
        ERASE TGO 2
        ERASE TIME2 2

IGNITION
        CS      FLAGWRD5        ; insure the engine flag is set
        MASK    ENGONBIT
        ADS     FLAGWRD5
        CS      PRIO30          ; turn on the engine
        EXTEND
        RAND    DSALMOUT
        AD      BIT13
        EXTEND
        WRITE   DSALMOUT
        EXTEND
        DCA     TIME2           ; set TEVENT for downlink
        DXCH    TEVENT
        EXTEND
        DCA     TGO             ; update TIG using TGO
        DXCH    TIG
        EXTEND
        DCA     TIME2
        DAS     TIG
DONE    TCF     DONE

BIT13   OCT     20000
ENGONBIT OCT    20000
PRIO30  OCT     30000
"""

result = assemble(SOURCE)
print("symbols:")
for name in ("IGNITION", "FLAGWRD5", "TIG", "DSALMOUT"):
    sym = result.symbols[name]
    print("  %-9s %-9s %05o" % (name, sym.kind, sym.value))

mem = MemorySystem()
mem.load_rope(result.image)
state = MachineState(mem)

# seed the double-precision inputs: TIME2 = (5,100), TGO = (2,300)
for name, pair in (("TIME2", (5, 100)), ("TGO", (2, 300))):
    addr = result.symbols[name].value
    mem.write(addr, pair[0])
    mem.write(addr + 1, pair[1])

outcome = run(state, limit=100, trace=lambda r: print(trace_line(r)))
print("outcome:", outcome.reason, "after", outcome.cycles, "cycles")

syms = result.symbols
print("FLAGWRD5 = %05o" % mem.read(syms["FLAGWRD5"].value).data)
print("engine on:", mem.channels.engine_on)
tig = syms["TIG"].value
print("TIG = (%05o, %05o)" % (mem.read(tig).data, mem.read(tig + 1).data))
