"""Concatenating singular one-mode Gaussian channels with Gaussian unitaries.

Draws one random member of each family, composes them and reports the family
of the result together with the tuple homomorphism error.
"""

import numpy as np

from divischan import gaussian as gs
from divischan.gaussian import GaussianForm, Kind

rng = np.random.default_rng(3)


def draw(name):
    b = rng.normal(size=4)
    b[2] = rng.uniform(0.3, 2)
    c = rng.normal(size=2)
    a = rng.uniform(0.2, 1, 3)
    if name == "A_U":
        b[1] = b[2]
        return GaussianForm(Kind.GF, b=b, c=c)
    if name == "delta_U":
        al, be, ga = rng.uniform(0.5, 2, 3)
        return gs.enforce_tp_hp(GaussianForm(Kind.DELTA2, b=b, c=c, e=[rng.normal(), rng.normal(), 0],
                                             alpha=al, beta=be, gamma=ga, eta=be * ga / al))
    al = 0.0 if "alpha" in name or name == "delta_A1" else rng.uniform(0.5, 2)
    e2 = 0.0 if "e2" in name or name == "delta_A1" else rng.uniform(0.5, 2)
    if name == "delta_A1":
        b[1] = 0.0
    return gs.enforce_tp_hp(GaussianForm(Kind.DELTA1, a=a, b=b, c=c, e=[rng.uniform(0.3, 2), e2, 0],
                                         alpha=al, beta=rng.uniform(0.5, 2)))


singular = ["delta_A2^alpha", "delta_A2^e2", "delta_A2^alpha,e2", "delta_A1"]
for s in singular:
    for u in ("A_U", "delta_U"):
        for first, second in ((s, u), (u, s)):
            f1, f2 = draw(first), draw(second)
            f = gs.concat(f1, f2)
            t1, t2, tf = gs.tuple_from_form(f1), gs.tuple_from_form(f2), gs.tuple_from_form(f)
            err = np.linalg.norm(tf.t - t1.t @ t2.t)
            print(f"{first:18s} after {second:18s} -> {gs.form_class(f, 1e-9):18s} |T_f - T1 T2| = {err:.1e}")
