"""Acceptance gate: every criterion at its stated tolerance.

Each test prints one ACCEPTANCE PASS line on success (run with -s or -rA
to see them); a failure of any assertion is the corresponding FAIL.
"""

import random
import time
from pathlib import Path

import pytest

from agcsim.asm import AssemblerConfig, assemble, disassemble
from agcsim.cpu import ENCODING, Instruction, MachineState, decode, encode, run
from agcsim.errors import CorruptWord, OperandRange
from agcsim.executive import ExecConfig, Executive
from agcsim.memory import CENTRAL, SWITCHED_ERASABLE, BankRegisters, MemorySystem, resolve
from agcsim.rope import RopeImage, banks_from_image, image_from_banks, plan_to_csv, readout, weave
from agcsim.words import Word, compute_parity, oc_add, oc_double_add

import test_executive as exec_helpers
from oracles import oracle_add, oracle_double_add

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


def report(name):
    print("\nACCEPTANCE PASS: %s" % name)


def test_parity_rule():
    t0 = time.monotonic()
    for data in range(0x8000):
        assert (data.bit_count() + compute_parity(data)) % 2 == 1
    mem = MemorySystem()
    rng = random.Random(101)
    for _ in range(64):
        addr = rng.randrange(0o0010, 0o1400)   # stored words, not register views
        mem.write(addr, rng.randrange(0x8000))
        good = mem.peek_raw(addr)
        for bit in range(16):
            mem.poke_raw(addr, good ^ (1 << bit))
            with pytest.raises(CorruptWord):
                mem.read(addr)
        mem.poke_raw(addr, good)
        mem.read(addr)
    elapsed = time.monotonic() - t0
    assert elapsed < 1.0, "parity sweep took %.2fs" % elapsed
    report("parity rule (exhaustive 32768 patterns + bit-flip detection, %.2fs)" % elapsed)


def test_ones_complement_oracle():
    t0 = time.monotonic()
    for a in range(16):
        for b in range(16):
            assert oc_add(a, b, bits=4) == oracle_add(a, b, bits=4)
    for a_hi in range(16):
        for a_lo in range(16):
            for b_hi in range(16):
                for b_lo in range(16):
                    got = oc_double_add(a_hi, a_lo, b_hi, b_lo, bits=4)
                    want = oracle_double_add(a_hi, a_lo, b_hi, b_lo, bits=4)
                    assert got == want
    rng = random.Random(102)
    for _ in range(1_000_000):
        a = rng.randrange(0x8000)
        b = rng.randrange(0x8000)
        assert oc_add(a, b) == oracle_add(a, b)
    for _ in range(100_000):
        quad = (rng.randrange(0x8000), rng.randrange(0x8000),
                rng.randrange(0x8000), rng.randrange(0x8000))
        assert oc_double_add(*quad) == oracle_double_add(*quad)
    elapsed = time.monotonic() - t0
    assert elapsed < 10.0, "arithmetic oracle sweep took %.2fs" % elapsed
    report("one's-complement oracle (4-bit exhaustive + 1e6 pairs, %.2fs)" % elapsed)


def test_capacity_reproduction():
    erasable = set()
    regs = BankRegisters()
    for eb in range(8):
        regs.eb = eb
        for addr in range(0o1400, 0o2000):
            loc = resolve(addr, regs)
            assert loc.region in (SWITCHED_ERASABLE, CENTRAL)
            erasable.add((loc.bank, loc.offset))
    assert len(erasable) == 8 * 256 == 2048
    fixed = set()
    for superbank in (False, True):
        regs.superbank = superbank
        for fb in range(32):
            regs.fb = fb
            for addr in range(0o2000, 0o4000):
                loc = resolve(addr, regs)
                if loc.bank < 36:
                    fixed.add((loc.bank, loc.offset))
    assert len(fixed) == 36 * 1024 == 36864
    assert len(fixed) * 2 == 73728          # bytes incl. parity = 72 KiB
    assert len(erasable) * 2 == 4096        # bytes = 4 KiB
    report("capacity reproduction (36x1024 fixed = 73728 B, 8x256 erasable = 4096 B)")


def test_table1_reproduction():
    values = [0b0100, 0b0010, 0b0110, 0b1001]
    plan = weave(values, 4)
    assert readout(plan) == values
    golden = (GOLDEN / "table1_weave.csv").read_bytes()
    assert plan_to_csv(plan).encode() == golden
    report("weave truth-table reproduction (A=0100 B=0010 C=0110 D=1001, golden CSV)")


def hand_simulated_ignition(time2, tgo, flagwrd5=0, dsalmout=0):
    """Independent value-level walk of the ignition sequence."""
    comp = lambda x: x ^ 0o77777
    engonbit = bit13 = 0o20000
    prio30 = 0o30000
    a = comp(flagwrd5)
    a &= engonbit
    flagwrd5, _ = oracle_add(a, flagwrd5)
    a = comp(prio30)
    a &= dsalmout
    a, _ = oracle_add(a, bit13)
    dsalmout = a
    tevent = time2
    tig_hi, tig_lo, _ = oracle_double_add(tgo[0], tgo[1], time2[0], time2[1])
    return flagwrd5, dsalmout, tevent, (tig_hi, tig_lo)


def test_listing_one_end_to_end():
    t0 = time.monotonic()
    result = assemble((FIXTURES / "ignition.agc").read_text())
    mem = MemorySystem()
    mem.load_rope(result.image)
    state = MachineState(mem)
    syms = result.symbols
    time2, tgo = (5, 100), (2, 300)
    exec_helpers.seed_doubles(mem, syms)
    outcome = run(state, limit=100)
    assert outcome.reason == "halt"
    assert outcome.cycles <= 40

    want_flag, want_dsalmout, want_tevent, want_tig = hand_simulated_ignition(time2, tgo)
    flag = mem.read(syms["FLAGWRD5"].value).data
    assert flag & 0o20000, "(a) ENGONBIT bit not set in FLAGWRD5"
    assert flag == want_flag
    dsalmout = mem.channels.read(syms["DSALMOUT"].value)
    assert dsalmout & 0o20000, "(b) DSALMOUT bit 13 clear"
    assert mem.channels.engine_on
    assert dsalmout == want_dsalmout
    tevent = syms["TEVENT"].value
    assert (mem.read(tevent).data, mem.read(tevent + 1).data) == want_tevent == time2
    tig = syms["TIG"].value
    assert (mem.read(tig).data, mem.read(tig + 1).data) == want_tig
    elapsed = time.monotonic() - t0
    assert elapsed < 1.0
    report("ignition end-to-end vs hand simulation (flag/engine/tevent/tig, %.2fs)"
           % elapsed)


def test_round_trips():
    # decode(encode) over the whole subset x 4096 operands
    pools = {
        "addr12": range(0, 0o10000),
        "addr12f": range(0o2000, 0o10000),
        "addr10": range(0, 0o2000),
        "chan9": range(0, 0o1000),
        "none": range(0, 1),
    }
    checked = 0
    for mn, (_, kind, ext) in ENCODING.items():
        for operand in range(0o10000):
            valid = operand in pools[kind] and not (mn == "TC" and operand in (3, 6))
            if kind == "none":
                valid = operand == 0
            if valid:
                assert decode(encode(mn, operand), extend=ext) == \
                    Instruction(mn, operand, ext)
            else:
                with pytest.raises(OperandRange):
                    encode(mn, operand)
            checked += 1
    assert checked == len(ENCODING) * 4096

    # assemble . disassemble identity on 100 randomized programs
    import test_asm as asm_helpers
    rng = random.Random(103)
    for _ in range(100):
        image1 = assemble(asm_helpers.random_program(rng)).image
        image2 = assemble(disassemble(image1)).image
        assert image_from_banks(image1) == image_from_banks(image2)

    # container byte identity
    for _ in range(10):
        banks = {b: None for b in sorted(rng.sample(range(36), rng.randrange(0, 6)))}
        image = RopeImage({
            b: __import__("numpy").array(
                [Word.of(rng.randrange(0x8000)).packed for _ in range(1024)],
                dtype="uint16")
            for b in banks
        })
        blob = image_from_banks(image)
        assert image_from_banks(banks_from_image(blob)) == blob
    report("round-trips (decode/encode %d pairs, 100 asm/disasm programs, container)"
           % checked)


def test_restart_resume_differential():
    t0 = time.monotonic()
    symbols, clean_mem, _ = exec_helpers.run_restartable()
    baseline = exec_helpers.protected_cells(clean_mem)
    boundaries = [symbols["PH%d" % i].value for i in (1, 2, 3, 4)]
    for bp in boundaries:
        _, mem, _ = exec_helpers.run_restartable(inject_at=[bp])
        assert exec_helpers.protected_cells(mem) == baseline
    _, mem, _ = exec_helpers.run_restartable(inject_at=boundaries)
    assert exec_helpers.protected_cells(mem) == baseline
    elapsed = time.monotonic() - t0
    assert elapsed < 5.0
    report("restart-resume differential (4 boundaries + combined, %.2fs)" % elapsed)


def test_primary_runs_standalone():
    # the whole gate above imports nothing beyond this package and numpy
    import sys
    offenders = [m for m in sys.modules
                 if m.split(".")[0] in ("node", "frontend", "ws", "websockets")]
    assert not offenders
    report("primary component self-contained (no secondary artifacts imported)")
