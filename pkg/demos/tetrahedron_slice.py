"""Text map of the divisibility classes on a plane of Pauli channels.

Each character marks the class of the channel diag(1, l1, l2, l3) with
l1 + l2 + l3 fixed; the axes are l1 (across) and l2 (down).
"""

import sys

from divischan.cli import slice_points

SYMBOL = {"L": "L", "CP\\L": "c", "P\\CP": "p", "div\\P": "d", "indivisible": "x"}

total = float(sys.argv[1]) if len(sys.argv) > 1 else -0.4
resolution = 41
grid = {}
for lam, label, _ in slice_points(total, resolution):
    grid[(round(lam[0], 9), round(lam[1], 9))] = SYMBOL[label]
xs = sorted({k[0] for k in grid})
ys = sorted({k[1] for k in grid}, reverse=True)
print(f"l1 + l2 + l3 = {total}; " + ", ".join(f"{v} = {k}" for k, v in SYMBOL.items()))
for y in ys:
    print("".join(grid.get((x, y), " ") for x in xs))
