"""Divisibility classes along the collision model that implements the NOT gate.

Prints the runs of the divisibility indicator delta and the times where it
changes, then writes the full trajectory as CSV next to this script.
"""

import math
from pathlib import Path

from divischan import dynmaps as dm

STEPS = 512

points = dm.sweep(dm.collision_not_map, 0.0, math.pi, STEPS)
deltas = [p.report.delta for p in points]
for index, delta in dm.transitions(deltas):
    p = points[index]
    print(f"t = {p.t:.4f}  delta = {delta:.3f}  label = {p.report.label:12s}  det = {p.report.det:+.4f}  chi = {p.report.chi}")

out = Path(__file__).with_name("collision_sweep.csv")
with out.open("w", newline="") as fh:
    dm.write_csv(points, fh)
print(f"wrote {out}")
