"""Collapse, revival and divisibility of a two-level atom in a coherent field.

Compares the simulated excited-state population with the analytic series and
counts how often the divisibility class changes around the first revival.
"""

import math

import numpy as np

from divischan import divisibility as dv
from divischan import dynmaps as dm

params = dm.JcParams(alpha=6, g=10, omega_a=5, omega_f=20)
prop = dm.JcPropagator(params)
omega = math.sqrt(params.detuning**2 / 4 + params.g**2 * abs(params.alpha) ** 2)
t_revival = math.pi / (params.g**2 / (2 * omega))
print(f"Fock cutoff {params.n_fock}, first revival near t = {t_revival:.3f}")

for t in np.linspace(0, 2 * t_revival, 41):
    report = dv.classify(prop.channel(t))
    p_sim = dm.jc_simulated_excited_probability(t, prop)
    p_exact = dm.jc_excited_probability(t, params)
    bar = "#" * int(round(40 * p_sim))
    print(f"t = {t:6.3f}  p_e = {p_sim:.4f} (series {p_exact:.4f})  delta = {report.delta:.3f}  chi = {report.chi}  {bar}")

window = np.linspace(t_revival / 2, 3 * t_revival / 2, 1000)
runs = dm.transitions([dv.classify(prop.channel(t)).delta for t in window])
print(f"{len(runs) - 1} class changes on [{window[0]:.2f}, {window[-1]:.2f}]")
