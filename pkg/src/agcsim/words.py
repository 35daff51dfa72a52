"""15+1-bit words, odd parity, and one's-complement arithmetic.

Every stored word is 15 data bits plus one parity bit chosen so the total
count of 1s is odd; an even count marks the word as corrupted.  Arithmetic
is one's complement with end-around carry, so +0 (all zeros) and -0 (all
ones) are distinct patterns of equal numeric value.
"""

from dataclasses import dataclass

from .errors import CorruptWord

WORD_BITS = 15
WORD_MASK = 0o77777          # 15 data bits
SIGN_BIT = 0o40000           # top bit of the 15-bit field
MAX_MAGNITUDE = 0o37777      # 2^14 - 1

# overflow indicators returned by the add routines
OVF_NONE = "none"
OVF_POSITIVE = "positive"
OVF_NEGATIVE = "negative"


def compute_parity(data: int) -> int:
    """Parity bit that makes the 16-bit total 1-count odd."""
    assert 0 <= data <= WORD_MASK
    return (data.bit_count() & 1) ^ 1


@dataclass(frozen=True)
class Word:
    """One storage word: 15 data bits plus the parity bit."""

    data: int
    parity: int

    @classmethod
    def of(cls, data: int) -> "Word":
        """Build a word with correct odd parity for ``data``."""
        data &= WORD_MASK
        return cls(data, compute_parity(data))

    @classmethod
    def from_packed(cls, packed: int) -> "Word":
        """Unpack the container layout: data in bits 16-2, parity in bit 1."""
        return cls((packed >> 1) & WORD_MASK, packed & 1)

    @property
    def packed(self) -> int:
        return (self.data << 1) | self.parity


def check_word(w: Word) -> None:
    """Raise CorruptWord unless the 16-bit 1-count is odd."""
    if ((w.data.bit_count() + w.parity) & 1) == 0:
        raise CorruptWord("word %05o/%d has even 1-count" % (w.data, w.parity))


def oc_complement(a: int, bits: int = WORD_BITS) -> int:
    """Bitwise NOT over the data field; one's-complement negation."""
    return ~a & ((1 << bits) - 1)


def oc_add(a: int, b: int, bits: int = WORD_BITS) -> tuple[int, str]:
    """One's-complement sum with end-around carry.

    Returns (sum pattern, overflow), where overflow is reported when the
    operand signs agree and the result sign differs.  The overflow never
    lands in a stored bit; it travels out-of-band.
    """
    mask = (1 << bits) - 1
    sign = 1 << (bits - 1)
    s = a + b
    if s > mask:
        s = (s + 1) & mask
    if (a & sign) == (b & sign) and (s & sign) != (a & sign):
        ovf = OVF_NEGATIVE if a & sign else OVF_POSITIVE
    else:
        ovf = OVF_NONE
    return s, ovf


def to_signed(a: int, bits: int = WORD_BITS) -> int:
    """Numeric value of a pattern; both zeros read as 0."""
    if a & (1 << (bits - 1)):
        return -(oc_complement(a, bits))
    return a


def from_signed(v: int, bits: int = WORD_BITS) -> int:
    """Pattern for a numeric value; 0 maps to +0."""
    if v < 0:
        return oc_complement(-v, bits)
    return v


@dataclass(frozen=True)
class SignedValue:
    """Sign-and-magnitude view of a 15-bit pattern, keeping -0 and +0 apart."""

    magnitude: int
    negative: bool

    @classmethod
    def decode(cls, a: int, bits: int = WORD_BITS) -> "SignedValue":
        if a & (1 << (bits - 1)):
            return cls(oc_complement(a, bits), True)
        return cls(a, False)

    def encode(self, bits: int = WORD_BITS) -> int:
        if self.negative:
            return oc_complement(self.magnitude, bits)
        return self.magnitude

    @property
    def value(self) -> int:
        return -self.magnitude if self.negative else self.magnitude


def oc_double_add(a_hi: int, a_lo: int, b_hi: int, b_lo: int,
                  bits: int = WORD_BITS) -> tuple[int, int, str]:
    """Double-precision one's-complement add.

    A pair (hi, lo) represents hi*2^(bits-1) + lo with each half carrying
    its own sign.  A low-half overflow is corrected by flipping the low
    result's sign bit and carrying +/-1 into the high half.  The reported
    overflow is the high half's; when it is "none" the pair value is exact.
    """
    sign = 1 << (bits - 1)
    lo, lo_ovf = oc_add(a_lo, b_lo, bits)
    carry = 0
    if lo_ovf == OVF_POSITIVE:
        lo ^= sign
        carry = 1
    elif lo_ovf == OVF_NEGATIVE:
        lo ^= sign
        carry = oc_complement(1, bits)
    hi, ovf = oc_add(a_hi, b_hi, bits)
    if carry:
        hi, ovf2 = oc_add(hi, carry, bits)
        if ovf2 != OVF_NONE:
            ovf = ovf2
    return hi, lo, ovf


def double_to_signed(hi: int, lo: int, bits: int = WORD_BITS) -> int:
    """Numeric value of a double-precision pair."""
    return to_signed(hi, bits) * (1 << (bits - 1)) + to_signed(lo, bits)
