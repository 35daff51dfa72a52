import random

import numpy as np
import pytest

from agcsim.channels import parse_manifest
from agcsim.errors import CorruptWord, ReadOnlyViolation, Unmapped
from agcsim.memory import (
    CENTRAL,
    REG_A,
    REG_BB,
    REG_EB,
    REG_FB,
    REG_Z,
    REG_ZERO,
    SWITCHED_ERASABLE,
    SWITCHED_FIXED,
    UNSWITCHED_ERASABLE,
    BankRegisters,
    ArrayErasable,
    McmErasable,
    MemorySystem,
    resolve,
)
from agcsim.rope import BANK_WORDS, RopeImage
from agcsim.words import Word


def full_image(rng=None, banks=36) -> RopeImage:
    rng = rng or random.Random(20)
    return RopeImage({
        b: np.array([Word.of(rng.randrange(0x8000)).packed for _ in range(BANK_WORDS)],
                    dtype=np.uint16)
        for b in range(banks)
    })


def test_resolve_spec_examples():
    regs = BankRegisters()
    loc = resolve(0o0005, regs)
    assert loc.region == CENTRAL and loc.offset == REG_Z
    regs.eb = 3
    loc = resolve(0o1400, regs)
    assert (loc.region, loc.bank, loc.offset) == (SWITCHED_ERASABLE, 3, 0)
    regs.fb = 17
    loc = resolve(0o2000, regs)
    assert (loc.region, loc.bank, loc.offset) == (SWITCHED_FIXED, 17, 0)
    assert resolve(0o0010, regs).region == UNSWITCHED_ERASABLE
    with pytest.raises(Unmapped):
        resolve(0o4000, regs)


def test_resolve_superbank():
    regs = BankRegisters()
    regs.fb = 0o31
    assert resolve(0o2000, regs).bank == 0o31
    regs.superbank = True
    assert resolve(0o2000, regs).bank == 33
    regs.fb = 0o27
    assert resolve(0o2000, regs).bank == 0o27   # below the superbank window
    regs.fb = 0o37
    assert resolve(0o2000, regs).bank == 39     # unmapped at access time


def test_resolve_reaches_every_slot():
    erasable = set()
    fixed = set()
    regs = BankRegisters()
    for superbank in (False, True):
        regs.superbank = superbank
        for eb in range(8):
            regs.eb = eb
            for fb in range(32):
                regs.fb = fb
                for addr in (0o1400, 0o1777, 0o2000, 0o3777):
                    loc = resolve(addr, regs)
                    if loc.region in (SWITCHED_ERASABLE, CENTRAL):
                        erasable.add((loc.bank, loc.offset))
                    elif loc.bank < 36:
                        fixed.add((loc.bank, loc.offset))
    regs = BankRegisters()
    for eb in range(8):
        regs.eb = eb
        for addr in range(0o1400, 0o2000):
            loc = resolve(addr, regs)
            erasable.add((loc.bank, loc.offset))
    # every window address resolves to exactly one region for any registers
    for addr in range(0o4000):
        assert resolve(addr, regs) is not None
    assert len(erasable) == 8 * 256
    for superbank in (False, True):
        regs.superbank = superbank
        for fb in range(32):
            regs.fb = fb
            for addr in range(0o2000, 0o4000):
                loc = resolve(addr, regs)
                if loc.bank < 36:
                    fixed.add((loc.bank, loc.offset))
    assert len(fixed) == 36 * 1024


def test_erasable_roundtrip_and_hardwired_zero():
    sys = MemorySystem()
    sys.write(0o0030, 0o1234)
    assert sys.read(0o0030).data == 0o1234
    sys.write(0o0007, 0o1234)
    assert sys.read(0o0007).data == 0
    sys.write(REG_A, 0o4242)
    assert sys.read(0o1400).data == 0o4242      # eb=0 window shows central A
    assert (sys.erasable.get(0, 0) >> 1) == 0o4242   # same backing slot


def test_fixed_is_read_only():
    sys = MemorySystem()
    sys.load_rope(full_image(banks=1))
    with pytest.raises(ReadOnlyViolation):
        sys.write(0o2000, 0o1)


def test_bank_register_consistency():
    sys = MemorySystem()
    sys.write(REG_EB, 0o5)
    sys.write(REG_FB, 0o21)
    assert sys.read(REG_BB).data == (0o21 << 3) | 0o5
    sys.write(REG_BB, (0o3 << 3) | 0o2)
    assert sys.read(REG_EB).data == 0o2
    assert sys.read(REG_FB).data == 0o3
    rng = random.Random(21)
    for _ in range(200):
        reg = rng.choice([REG_EB, REG_FB, REG_BB])
        sys.write(reg, rng.randrange(0x8000))
        eb, fb, bb = (sys.read(r).data for r in (REG_EB, REG_FB, REG_BB))
        assert bb == (fb << 3) | eb


def test_load_rope_and_read_everything():
    sys = MemorySystem()
    image = full_image()
    sys.load_rope(image)
    count = 0
    for superbank, fbs in ((False, range(32)), (True, range(0o30, 0o34))):
        sys.channels.write(sys.manifest.channels["SUPERBNK"], int(superbank))
        for fb in fbs:
            sys.write(REG_FB, fb)
            for addr in range(0o2000, 0o4000):
                sys.read(addr)
                count += 1
    assert count == 36 * 1024


def test_load_rope_parity_fault_names_location():
    image = full_image(banks=2)
    image.banks[1][0o123] ^= 1
    with pytest.raises(CorruptWord) as err:
        MemorySystem().load_rope(image)
    assert err.value.bank == 1 and err.value.offset == 0o123


def test_empty_rope_reads_unmapped():
    sys = MemorySystem()
    sys.load_rope(RopeImage({}))
    with pytest.raises(Unmapped):
        sys.read(0o2000)


def test_strict_parity_toggle():
    sys = MemorySystem()
    sys.write(0o0100, 0o777)
    sys.poke_raw(0o0100, sys.peek_raw(0o0100) ^ 0b100)   # flip one data bit
    with pytest.raises(CorruptWord) as err:
        sys.read(0o0100)
    assert err.value.address == 0o0100
    sys.strict_parity = False
    sys.read(0o0100)


def test_write_fuzz_never_touches_fixed():
    sys = MemorySystem()
    sys.load_rope(full_image(banks=4))
    before = sys.fixed_checksum()
    rng = random.Random(22)
    for _ in range(5000):
        addr = rng.randrange(0o4000)
        try:
            sys.write(addr, rng.randrange(0x8000))
        except ReadOnlyViolation:
            pass
    assert sys.fixed_checksum() == before


def test_mcm_backed_store_equivalent_to_array():
    mcm = McmErasable()
    a = MemorySystem(erasable_store=mcm)
    b = MemorySystem(erasable_store=ArrayErasable())
    rng = random.Random(23)
    reads = 0
    for _ in range(2000):
        addr = rng.randrange(0o0010, 0o2000)
        if rng.random() < 0.5:
            v = rng.randrange(0x8000)
            a.write(addr, v)
            b.write(addr, v)
        else:
            assert a.read(addr).data == b.read(addr).data
            reads += 1
    assert mcm.rewrite_cycles == 16 * reads


def test_mirror_delegates_to_bus():
    manifest = parse_manifest("""
    channel DSALMOUT 011
    channel FOO 040
    mirror 0300 040
    """)
    sys = MemorySystem(manifest=manifest)
    sys.write(0o300, 0o555)
    assert sys.channels.read(0o40) == 0o555
    sys.channels.write(0o40, 0o666)
    assert sys.read(0o300).data == 0o666


def test_erasable_snapshot_shape():
    sys = MemorySystem()
    sys.write(REG_A, 5)
    snap = sys.erasable_snapshot()
    assert len(snap) == 2048
    assert Word.from_packed(snap[REG_A]).data == 5
    assert Word.from_packed(snap[REG_ZERO]).data == 0
