import random
from pathlib import Path

import pytest

from agcsim.asm import (
    AssemblerConfig,
    assemble,
    disassemble,
    parse_symbols_text,
    symbols_text,
)
from agcsim.cpu import ENCODING, decode, encode
from agcsim.errors import (
    AsmError,
    BankOverflow,
    DuplicateLabel,
    OperandRange,
    UndefinedSymbol,
    UnknownMnemonic,
)
from agcsim.rope import image_from_banks
from agcsim.words import Word, compute_parity

FIXTURES = Path(__file__).parent / "fixtures"

OPERAND_POOLS = {
    "addr12": range(0, 0o10000),
    "addr12f": range(0o2000, 0o10000),
    "addr10": range(0, 0o2000),
    "chan9": range(0, 0o1000),
}


def words_of(result, bank=0):
    return [int(w) >> 1 for w in result.image.banks[bank]]


def test_ignition_fixture_assembles():
    result = assemble((FIXTURES / "ignition.agc").read_text())
    syms = result.symbols
    assert syms["FLAGWRD5"].kind == "erasable" and syms["FLAGWRD5"].value == 0o100
    assert syms["TIME2"].value == 0o107
    assert syms["DSALMOUT"].kind == "constant" and syms["DSALMOUT"].value == 0o11
    assert syms["IGNITION"].value == 0o2000
    assert syms["DONE"].value == 0o2022
    w = words_of(result)
    assert w[0] == encode("CS", 0o100)
    assert w[1] == encode("MASK", 0o2024)       # ENGONBIT cell
    assert w[2] == encode("ADS", 0o100)
    assert w[4] == encode("EXTEND")
    assert w[5] == encode("RAND", 0o11)
    assert w[0o22] == encode("TCF", 0o2022)     # DONE self-loop
    assert w[0o23] == 0o20000                   # BIT13 cell contents
    assert w[0o25] == 0o30000                   # PRIO30 cell contents


def test_contiguous_block_lands_in_order():
    src = "\n".join("        CA 0100" for _ in range(10))
    result = assemble(src)
    assert words_of(result)[:10] == [encode("CA", 0o100)] * 10


def test_auto_extend_inserted_and_label_covers_it():
    result = assemble("GO      DCA 0100\n        TCF GO\n")
    w = words_of(result)
    assert w[0] == encode("EXTEND")
    assert w[1] == encode("DCA", 0o100)
    assert result.symbols["GO"].value == 0o2000
    assert w[2] == encode("TCF", 0o2000)
    # explicit EXTEND is not doubled
    explicit = assemble("        EXTEND\n        DCA 0100\n")
    assert words_of(explicit)[:2] == [encode("EXTEND"), encode("DCA", 0o100)]


def test_errors_carry_line_numbers():
    with pytest.raises(UndefinedSymbol, match="line 1.*NOSUCH"):
        assemble("        CA NOSUCH\n")
    with pytest.raises(DuplicateLabel):
        assemble("A       NOOP\nA       NOOP\n")
    with pytest.raises(UnknownMnemonic):
        assemble("        FROB 1\n")
    with pytest.raises(OperandRange):
        assemble("        TCF 100\n")           # TCF cannot reach erasable
    with pytest.raises(OperandRange):
        assemble("        EXTEND\n        READ 1000\n")
    with pytest.raises(BankOverflow):
        assemble("\n".join("        NOOP" for _ in range(1025)))


def test_directives():
    src = """
        = FIVE 5
        = TEN 12
        = TEND 10D
        ERASE BUF 3
        ERASE NEXT
        SETLOC 2 100
HERE    CA BUF+2
        BANK 3
        OCT 77777
        ADRES HERE
"""
    result = assemble(src)
    syms = result.symbols
    assert syms["FIVE"].value == 5 and syms["TEN"].value == 0o12
    assert syms["TEND"].value == 10
    assert syms["BUF"].value == 0o100 and syms["NEXT"].value == 0o103
    assert syms["HERE"].value == 0o2100 and syms["HERE"].bank == 2
    assert result.image.banks[2][0o100] >> 1 == encode("CA", 0o102)
    assert result.image.banks[3][0] >> 1 == 0o77777
    assert result.image.banks[3][1] >> 1 == 0o2100


def test_aliases_and_case():
    result = assemble("        return\n        relint\n        inhint\n        noop\n")
    assert words_of(result)[:4] == [0o2, 0o3, 0o3, 0o3]
    with pytest.raises(UndefinedSymbol):
        assemble("FOO     NOOP\n        CA foo\n")   # symbols are case-sensitive


def test_predefined_bit13_overridable():
    result = assemble("        = X BIT13\n        OCT 0\n")
    assert result.symbols["X"].value == 0o20000
    override = assemble("        = BIT13 7\n        = X BIT13\n        OCT 0\n")
    assert override.symbols["X"].value == 7


def test_label_only_line_binds_to_next_word():
    result = assemble("ENTRY\n        NOOP\n")
    assert result.symbols["ENTRY"].value == 0o2000
    with pytest.raises(AsmError):
        assemble("DANGLING\n")


def test_every_emitted_word_has_odd_parity():
    result = assemble((FIXTURES / "ignition.agc").read_text())
    for packed in result.image.banks[0]:
        w = Word.from_packed(int(packed))
        assert compute_parity(w.data) == w.parity


def test_listing_mentions_addresses_and_source():
    result = assemble("START   NOOP    ; hello\n")
    line = result.listing.splitlines()[0]
    assert line.startswith("00 2000  00003")
    assert "; hello" in line


def test_symbols_text_roundtrip():
    result = assemble((FIXTURES / "ignition.agc").read_text())
    text = symbols_text(result.symbols)
    back = parse_symbols_text(text)
    assert back.keys() == result.symbols.keys()
    for name in back:
        assert back[name].kind == result.symbols[name].kind
        assert back[name].value == result.symbols[name].value


def random_program(rng) -> str:
    lines = []
    mnemonics = [m for m in ENCODING if m not in ("NOOP", "EXTEND")]
    for _ in range(rng.randrange(1, 120)):
        roll = rng.random()
        if roll < 0.1:
            lines.append("        OCT %05o" % rng.randrange(0x8000))
            continue
        mn = rng.choice(mnemonics)
        kind = ENCODING[mn][1]
        while True:
            operand = rng.choice(OPERAND_POOLS[kind])
            if not (mn == "TC" and operand in (3, 6)):
                break
        if rng.random() < 0.2:
            lines.append("        EXTEND")
            if mn in ("READ", "WRITE", "RAND", "DCA"):
                lines.append("        %s %04o" % (mn, operand))
                continue
        lines.append("        %s %04o" % (mn, operand))
    return "\n".join(lines) + "\n"


def test_assemble_disassemble_identity_random_programs():
    rng = random.Random(41)
    for _ in range(30):
        src = random_program(rng)
        image1 = assemble(src).image
        src2 = disassemble(image1)
        image2 = assemble(src2).image
        assert image_from_banks(image1) == image_from_banks(image2)


def test_disassemble_roundtrips_ignition():
    image1 = assemble((FIXTURES / "ignition.agc").read_text()).image
    image2 = assemble(disassemble(image1)).image
    assert image_from_banks(image1) == image_from_banks(image2)


def test_disassemble_empty_and_raw_words():
    from agcsim.rope import RopeImage
    assert disassemble(RopeImage({})) == "\n"
    import numpy as np
    bank = np.full(1024, Word.of(0).packed, dtype=np.uint16)
    bank[0] = Word.of(0o22000).packed          # unimplemented row
    image = RopeImage({0: bank})
    text = disassemble(image)
    assert "OCT     22000" in text.splitlines()[1]
    image2 = assemble(text).image
    assert image_from_banks(image) == image_from_banks(image2)


def test_disassemble_labels_from_symbols():
    result = assemble((FIXTURES / "ignition.agc").read_text())
    text = disassemble(result.image, result.symbols)
    assert any(line.startswith("IGNITION") for line in text.splitlines())
    image2 = assemble(text).image
    assert image_from_banks(result.image) == image_from_banks(image2)
