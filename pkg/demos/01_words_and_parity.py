"""Words, odd parity, and one's-complement arithmetic.

Every stored word is 15 data bits plus a parity bit that makes the total
count of 1s odd.  Arithmetic is one's complement with end-around carry,
which gives the machine two zeros: +0 (all zeros) and -0 (all ones).
"""

from agcsim import Word, compute_parity, oc_add, oc_complement, oc_double_add
from agcsim.words import to_signed

print("parity of 00000 octal:", compute_parity(0o00000))
print("parity of 00001 octal:", compute_parity(0o00001))

w = Word.of(0o12345)
print("word 12345 packs to %06o (parity bit %d)" % (w.packed, w.parity))

# +1 plus -1 gives -0, not +0
s, ovf = oc_add(0o00001, oc_complement(0o00001))
print("+1 + -1 = %05o (value %d, overflow %s)" % (s, to_signed(s), ovf))

# the end-around carry at work: -1 + +2 = +1
s, _ = oc_add(oc_complement(1), 2)
print("-1 + +2 = %05o (value %d)" % (s, to_signed(s)))

# overflow is reported out-of-band, never stored in the word
s, ovf = oc_add(0o37777, 1)
print("+16383 + 1 = %05o, overflow=%s" % (s, ovf))

# double precision: each half carries its own sign; a low-half overflow
# moves one unit into the high half
hi, lo, ovf = oc_double_add(0, 0o37777, 0, 1)
print("(0,+16383) + (0,+1) = (%05o,%05o) overflow=%s" % (hi, lo, ovf))
