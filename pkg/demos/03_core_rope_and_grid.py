"""Core-rope weave plans and the magnetic-core grid.

A rope stores a 1 where the sense line threads through a core and a 0
where it passes around; reading the plan back recovers the words.  The
erasable side is a row/column grid of cores whose reads are destructive
and immediately rewritten.
"""

from agcsim import McmGrid, readout, weave
from agcsim.rope import plan_to_csv

# the four-line, four-core example: A=0100 B=0010 C=0110 D=1001
values = [0b0100, 0b0010, 0b0110, 0b1001]
plan = weave(values, 4)

for i, name in enumerate("ABCD"):
    row = "".join("#" if t else "." for t in plan.passes[i])
    print("line %s: %s  (%s)" % (name, row, format(values[i], "04b")))

print("readout:", [format(v, "04b") for v in readout(plan)])
print()
print(plan_to_csv(plan))

grid = McmGrid(4, 4)
grid.write(2, 3, 1)
print("cell (2,3):", grid.read(2, 3))
print("cell (0,0):", grid.read(0, 0))
print("rewrite cycles after two reads:", grid.rewrite_cycles)
