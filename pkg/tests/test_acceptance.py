"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest -s tests/test_acceptance.py`` to see the summary lines, or
``python3 tests/test_acceptance.py`` for the lines alone.  Failures are
reported as they are; see the decisions ledger for the analysis of each one.
"""

import math
import sys
import time

import numpy as np
import pytest

from divischan import chanrep as cr
from divischan import divisibility as dv
from divischan import dynmaps as dm
from divischan import gaussian as gs
from divischan import lindblad as lb
from divischan import normalform as nf
from divischan.gaussian import GaussianForm, Kind, SingularClass

BELT = 1e-9

# collected for the terminal summary in conftest.py
SUMMARY: dict[int, str] = {}


def report(n: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {detail}"
    SUMMARY[n] = line
    print(line)
    sys.stdout.flush()
    assert ok, line


def tetrahedron_inequalities(lam: np.ndarray) -> np.ndarray:
    l1, l2, l3 = lam.T
    return np.stack([1 + l1 + l2 + l3, 1 + l1 - l2 - l3, 1 - l1 + l2 - l3, 1 - l1 - l2 + l3], axis=-1)


def cube_grid(n: int) -> np.ndarray:
    g = np.linspace(-1, 1, n)
    return np.stack(np.meshgrid(g, g, g, indexing="ij"), -1).reshape(-1, 3)


def pauli_batch(lam: np.ndarray) -> np.ndarray:
    ptms = np.zeros((len(lam), 4, 4))
    ptms[:, 0, 0] = 1
    ptms[:, [1, 2, 3], [1, 2, 3]] = lam
    return ptms


# -- 1: CP tetrahedron -----------------------------------------------------------


def test_criterion_01_cp_tetrahedron():
    start = time.perf_counter()
    lam = cube_grid(101)
    verdict = cr.is_cptp_batch(pauli_batch(lam))
    ineq = tetrahedron_inequalities(lam)
    belt = np.any(np.abs(ineq) <= BELT, axis=1)
    expected = np.all(ineq >= 0, axis=1)
    mismatches = int(np.sum(verdict[~belt] != expected[~belt]))
    elapsed = time.perf_counter() - start
    report(1, mismatches == 0 and elapsed < 30,
           f"{len(lam)} grid points, {mismatches} mismatches outside a {belt.sum()}-point belt, {elapsed:.1f} s")


# -- 2: NOT-gate determinant --------------------------------------------------------


def test_criterion_02_not_gate_determinant():
    details, ok = [], True
    for name, e in (("A_NOT", dm.a_not()), ("transposition", dm.approx_transposition())):
        r = dv.classify(e)
        err = abs(np.linalg.det(e) + 1 / 27)
        ok &= err <= 1e-15 and r.delta == 0 and r.chi == 1
        details.append(f"{name}: |det + 1/27| = {err:.1e}, delta = {r.delta}, chi = {r.chi}")
    report(2, ok, "; ".join(details))


# -- 3: collision-model transitions --------------------------------------------------


def test_criterion_03_collision_transitions():
    start = time.perf_counter()
    steps = 512
    pts = dm.sweep(dm.collision_not_map, 0.0, math.pi, steps)
    elapsed = time.perf_counter() - start
    deltas = [p.report.delta for p in pts]
    runs = dm.transitions(deltas)
    sequence = [v for _, v in runs]
    dt = math.pi / (steps - 1)
    # crossings into and out of the delta = 0 region
    into = [pts[i].t for (i, v), (_, prev) in zip(runs[1:], runs) if v == 0 and prev == 1 / 3]
    out = [pts[i].t for (i, v), (_, prev) in zip(runs[1:], runs) if v == 1 / 3 and prev == 0]
    ok_seq = sequence == pytest.approx([1, 1 / 3, 0, 1 / 3, 1])
    ok_cross = (len(into) == 1 and len(out) == 1
                and abs(into[0] - math.pi / 3) <= dt and abs(out[0] - 2 * math.pi / 3) <= dt)
    # the crossing time is the first grid point of the new run; the true
    # crossing lies between it and the previous grid point
    labels = sorted({p.report.label for p in pts if p.report.delta == 0})
    report(3, ok_seq and ok_cross and elapsed < 10,
           f"delta runs {[round(v, 3) for v in sequence]}, delta = 0 labels {labels}, "
           f"crossings {[round(t, 4) for t in into + out]} vs "
           f"({math.pi / 3:.4f}, {2 * math.pi / 3:.4f}) +- {dt:.4f}, {elapsed:.1f} s")


# -- 4: negative determinant implies entanglement breaking ------------------------------


def test_criterion_04_negative_determinant_is_eb():
    start = time.perf_counter()
    rng = np.random.default_rng(4)
    batch = cr.random_cptp_batch(rng, 100_000)
    det = np.linalg.det(batch)
    negative = det < -1e-9
    ppt = dv.ppt_min_eigenvalues(batch) >= -1e-9
    counter = int(np.sum(negative & ~ppt))
    elapsed = time.perf_counter() - start
    report(4, counter == 0 and elapsed < 60,
           f"{negative.sum()} of {len(batch)} channels with det < -1e-9, {counter} not PPT, {elapsed:.1f} s")


# -- 5: L-divisibility equals infinite divisibility for Pauli channels --------------------


ROOT_ORDERS = (2, 3, 5, 10)


def _root_fails(lam, orders) -> bool:
    for n in orders:
        root = dv.nth_root_pauli(lam, n)
        if root is None or not np.isrealobj(root) or not cr.is_cptp(root).cptp:
            return True
    return False


def test_criterion_05_pauli_l_equals_infinite_divisibility():
    lam = cube_grid(50)
    lam = lam[np.all(tetrahedron_inequalities(lam) >= 0, axis=1)]
    yes_mask = np.array([dv.pauli_l_divisibility(x).member for x in lam])
    yes, no = lam[yes_mask], lam[~yes_mask]

    yes_bad = 0
    for n in ROOT_ORDERS:
        roots = [dv.nth_root_pauli(x, n) for x in yes]
        missing = sum(r is None for r in roots)
        stack = np.array([r if r is not None else np.full((4, 4), np.nan) for r in roots])
        yes_bad += missing + int(np.sum(~cr.is_cptp_batch(stack)[[r is not None for r in roots]]))

    rng = np.random.default_rng(5)
    sample = no[rng.choice(len(no), 1000, replace=False)]
    undetected = [x for x in sample if not _root_fails(x, ROOT_ORDERS)]
    # diagnostic only: the smallest order at which each undetected point fails
    needed = [next((n for n in range(11, 1001) if _root_fails(x, (n,))), None) for x in undetected]
    report(5, yes_bad == 0 and not undetected,
           f"{len(yes)} 'yes' points with {yes_bad} failing roots; {len(undetected)} of 1000 'no' points "
           f"have CPTP roots for all n in {ROOT_ORDERS} (they fail first at n = {needed})")


# -- 6: logarithm roundtrip and branch independence ----------------------------------------


def random_ccp_generator(rng):
    h = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    scale = rng.uniform(0.05, 1.0)
    return lb.build_generator(scale * (h + h.conj().T) / 2, scale * a @ a.conj().T / 3)


def test_criterion_06_logarithm_roundtrip():
    rng = np.random.default_rng(6)
    worst, missing = 0.0, 0
    for _ in range(10_000):
        e = lb.exp_generator(random_ccp_generator(rng))
        g = lb.principal_logarithm(e)
        if g is None:
            missing += 1
            continue
        worst = max(worst, float(np.linalg.norm(lb.exp_generator(g) - e)))

    branch_mismatch, families = 0, 0
    for l1 in np.linspace(0.05, 0.95, 19):
        for mu in np.linspace(0.05, 0.95, 19):
            lam = (l1, -mu, -mu)
            if mu == l1 or np.min(tetrahedron_inequalities(np.array([lam]))) < 0:
                continue
            families += 1
            logs = lb.real_logarithms(cr.pauli_channel(lam), k_window=3)
            tags = {0 if g.branch_tag == "principal" else g.branch_tag for g in logs}
            verdicts = {lb.is_ccp(g) for g in logs}
            closed = dv.pauli_l_divisibility(lam).member
            if tags != set(range(-3, 4)) or verdicts != {closed}:
                branch_mismatch += 1
    report(6, worst <= 1e-9 and missing == 0 and branch_mismatch == 0,
           f"max roundtrip error {worst:.1e} over 10000 channels ({missing} without a logarithm); "
           f"{branch_mismatch} of {families} negative-pair channels with a branch-dependent verdict")


# -- 7: rank-three counterexample to the diagonal Lorentz form ---------------------------


RANK_THREE_CHANNEL = np.array([[1, 0, 0, 0], [0, -1 / 3, 0, 0], [0, 0, -1 / 3, 0], [2 / 3, 0, 0, 1 / 3]])


def test_criterion_07_non_diagonal_lorentz_form():
    f = nf.lorentz_normal_form(RANK_THREE_CHANNEL)
    r97, g1, g3 = math.sqrt(97), math.sqrt(15), math.sqrt(30)
    printed_l1 = np.array([[4, 0, 0, 1], [0, -g1, 0, 0], [0, 0, -g1, 0], [1, 0, 0, 4]]) / g1
    sigma = np.array(
        [
            [math.sqrt(11 + 109 / r97), 0, 0, -(r97 + 1) / math.sqrt(89 * r97 + 873)],
            [0, -g3 / 3, 0, 0],
            [0, 0, g3 / 3, 0],
            [math.sqrt(1 + 49 / r97), 0, 0, math.sqrt(-1 + 49 / r97)],
        ]
    ) / g3
    corners = ([0, 0, 3, 3], [0, 3, 0, 3])
    sigma_err = float(np.max(np.abs(f.sigma[corners] - sigma[corners])))
    l1_err = float(np.max(np.abs(f.l1 - printed_l1)))
    flip = np.diag([1.0, -1, -1, 1])  # rotation by pi about z
    gauge_err = float(np.max(np.abs(f.l1 @ flip - printed_l1)))
    b = f.abcd[1]
    ok = (not f.is_diagonal) and abs(b) > 1e-6 and l1_err <= 1e-10 and sigma_err <= 1e-10
    report(7, ok,
           f"non-diagonal = {not f.is_diagonal}, b = {b:.4f}, sqrt(97) entries of Sigma err {sigma_err:.1e}, "
           f"L1 entrywise err {l1_err:.2f} (after a pi rotation about z: {gauge_err:.1e})")


# -- 8: cavity-model cross-oracle ------------------------------------------------------


def test_criterion_08_jaynes_cummings():
    p = dm.JcParams(alpha=6, g=10, omega_a=5, omega_f=20)
    prop = dm.JcPropagator(p)
    pe_err = tp_err = 0.0
    cp_min = math.inf
    for t in np.linspace(0, 2, 200):
        e = prop.channel(t)
        pe_err = max(pe_err, abs(dm.jc_simulated_excited_probability(t, prop) - dm.jc_excited_probability(t, p)))
        tp_err = max(tp_err, float(np.max(np.abs(e[0] - [1, 0, 0, 0]))))
        cp_min = min(cp_min, float(cr.choi_from_ptm(e).eigenvalues[0]))
    # first revival: the phases 2 Omega_n t of neighbouring photon numbers
    # around the mean realign after pi / (dOmega/dn)
    n_bar = abs(p.alpha) ** 2
    omega = math.sqrt(p.detuning**2 / 4 + p.g**2 * n_bar)
    t_rev = math.pi / (p.g**2 / (2 * omega))
    window = np.linspace(t_rev / 2, 3 * t_rev / 2, 1000)
    runs = dm.transitions([dv.classify(prop.channel(t)).delta for t in window])
    flips = sum(1 for (_, a), (_, b) in zip(runs, runs[1:]) if {a, b} == {1 / 3, 2 / 3})
    ok = pe_err <= 1e-3 and tp_err <= 1e-8 and cp_min >= -1e-6 and flips >= 10
    report(8, ok,
           f"n_fock = {p.n_fock}, max |dp_e| = {pe_err:.1e}, TP err {tp_err:.1e}, min Choi eigenvalue {cp_min:.1e}, "
           f"{flips} transitions between 1/3 and 2/3 on [{window[0]:.2f}, {window[-1]:.2f}]")


# -- 9: Gaussian CP dual oracle -----------------------------------------------------------


def random_delta_form(rng, i):
    kind = Kind.DELTA1 if i % 2 else Kind.DELTA2
    al, be, ga = rng.uniform(-2, 2, 3)
    # every fourth draw of the two-delta kind is a Gaussian unitary
    eta = be * ga / al if (kind is Kind.DELTA2 and i % 4 == 0) else rng.uniform(-2, 2)
    return gs.enforce_tp_hp(
        GaussianForm(kind, a=rng.normal(size=3), b=rng.normal(size=4), c=rng.normal(size=2),
                     e=[rng.uniform(0.1, 2), rng.normal(), 0], alpha=al, beta=be,
                     gamma=ga if kind is Kind.DELTA2 else 0.0, eta=eta if kind is Kind.DELTA2 else 0.0)
    )


def test_criterion_09_gaussian_cp_dual_oracle():
    rng = np.random.default_rng(9)
    start = time.perf_counter()
    agree = total = belt = 0
    for i in range(10_000):
        f = random_delta_form(rng, i)
        m = np.linalg.eigvalsh(gs.tuple_from_form(f).c_matrix)[0]
        s = gs.cp_closed_form(f)
        if abs(m) <= BELT or abs(s) <= BELT:
            belt += 1
            continue
        total += 1
        agree += (m >= 0) == (s >= 0)
    elapsed = time.perf_counter() - start
    report(9, agree == total and elapsed < 5,
           f"{agree}/{total} verdicts agree, {belt} draws in the belt (the Gaussian unitaries among the draws "
           f"have a zero eigenvalue of C), {elapsed:.1f} s")


# -- 10: singular classes --------------------------------------------------------------------


def test_criterion_10_singular_classes():
    rng = np.random.default_rng(10)
    wrong = {"GF b2=0": 0, "DeltaI alpha e2=0": 0, "DeltaI A1": 0, "A1 CP": 0, "DeltaII": 0}
    for i in range(1000):
        b = rng.normal(size=4)
        b[1], b[2] = 0.0, rng.uniform(0.3, 2) * rng.choice([-1, 1])
        t = gs.tuple_from_form(GaussianForm(Kind.GF, a=rng.uniform(0.2, 1, 3), b=b, c=rng.normal(size=2)))
        wrong["GF b2=0"] += gs.singular_class(t) is not SingularClass.A2

        al, e2 = rng.normal(), rng.normal()
        if i % 3 == 0:
            al = 0.0
        elif i % 3 == 1:
            e2 = 0.0
        else:
            al = e2 = 0.0  # with b2 != 0 this is still rank one
        b = rng.normal(size=4)
        b[1] = rng.uniform(0.3, 2)
        f = gs.enforce_tp_hp(GaussianForm(Kind.DELTA1, a=rng.normal(size=3), b=b, c=rng.normal(size=2),
                                          e=[rng.uniform(0.1, 2), e2, 0], alpha=al, beta=rng.uniform(0.5, 2)))
        wrong["DeltaI alpha e2=0"] += gs.singular_class(gs.tuple_from_form(f)) is not SingularClass.A2

        e1, a1 = rng.uniform(0.1, 3, 2)
        b[1] = 0.0
        f = gs.enforce_tp_hp(GaussianForm(Kind.DELTA1, a=[a1, *rng.normal(size=2)], b=b, c=rng.normal(size=2),
                                          e=[e1, 0, 0], alpha=0, beta=rng.uniform(0.5, 2)))
        t = gs.tuple_from_form(f)
        wrong["DeltaI A1"] += gs.singular_class(t) is not SingularClass.A1
        if abs(e1 - a1) > BELT:
            wrong["A1 CP"] += int(gs.is_cp(t) != (e1 <= a1))

    for i in range(100_000):
        al, be, ga = rng.uniform(0.1, 2, 3) * rng.choice([-1, 1], 3)
        eta = be * ga / al if i % 2 else rng.uniform(0.1, 2) * rng.choice([-1, 1])
        f = gs.enforce_tp_hp(GaussianForm(Kind.DELTA2, a=rng.normal(size=3), b=rng.normal(size=4),
                                          c=rng.normal(size=2), e=[rng.normal(), rng.normal(), 0],
                                          d=[rng.normal(), 0], alpha=al, beta=be, gamma=ga, eta=eta))
        wrong["DeltaII"] += gs.singular_class(gs.tuple_from_form(f)) is not SingularClass.NONSINGULAR

    f = gs.enforce_tp_hp(GaussianForm(Kind.DELTA1, a=[0.7, 0.2, -0.4], b=[0.3, 0, 1.1, -0.5], c=[0.8, -0.3],
                                      e=[0.5, 0, 0], alpha=0, beta=1.3))
    t = gs.tuple_from_form(f)
    state_err = 0.0
    for _ in range(1000):
        a = rng.normal(size=(2, 2))
        s = gs.GaussianState(a @ a.T + 0.6 * np.eye(2), rng.normal(size=2))
        out = gs.apply_to_gaussian(t, s)
        state_err = max(state_err, float(np.max(np.abs(out.sigma - t.n))),
                        float(np.max(np.abs(out.d - [0, -f.c[0]]))))
    ok = not any(wrong.values()) and state_err <= 1e-10
    report(10, ok, f"misclassified {wrong}; A1 output state err {state_err:.1e} over 1000 states")


# -- 11: concatenation table and tuple homomorphism ---------------------------------------------


def signed(rng, lo=0.5, hi=2.0):
    return rng.uniform(lo, hi) * rng.choice([-1.0, 1.0])


def make(rng, name):
    a = rng.uniform(0.2, 1, 3)
    b = rng.normal(size=4)
    b[2] = signed(rng, 0.3, 2.0)
    c = rng.normal(size=2)
    if name == "A_U":
        b[1] = b[2]
        return GaussianForm(Kind.GF, b=b, c=c)
    if name == "gf":
        return GaussianForm(Kind.GF, a=a, b=b, c=c)
    if name in ("delta_U", "delta2"):
        al, be, ga = signed(rng), signed(rng), signed(rng)
        eta = be * ga / al if name == "delta_U" else signed(rng)
        return gs.enforce_tp_hp(
            GaussianForm(Kind.DELTA2, a=a if name == "delta2" else None, b=b, c=c,
                         e=[rng.normal(), rng.normal(), 0], d=[rng.normal(), 0],
                         alpha=al, beta=be, gamma=ga, eta=eta)
        )
    e1, e2, al = rng.uniform(0.3, 2), signed(rng), signed(rng)
    if "alpha" in name or name == "delta_A1":
        al = 0.0
    if "e2" in name or name == "delta_A1":
        e2 = 0.0
    if name == "delta_A1":
        b[1] = 0
    return gs.enforce_tp_hp(GaussianForm(Kind.DELTA1, a=a, b=b, c=c, e=[e1, e2, 0], alpha=al, beta=signed(rng)))


# (first form, second form, result); a row with a list covers each listed unitary
CONCAT_TABLE = [
    ("delta_A2^alpha", "A_U", "A_A2"),
    ("A_U", "delta_A2^alpha", "delta_A2^alpha"),
    ("delta_A2^alpha", "delta_U", "delta_A2^alpha"),
    ("delta_U", "delta_A2^alpha", "delta_A2^alpha"),
    ("delta_A2^e2", "A_U", "delta_A2^e2"),
    ("A_U", "delta_A2^e2", "A_A2"),
    ("delta_A2^e2", "delta_U", "delta_A2^e2"),
    ("delta_U", "delta_A2^e2", "delta_A2^e2"),
    (["A_U", "delta_U"], "delta_A2^alpha,e2", "delta_A2^alpha,e2"),
    ("delta_A2^alpha,e2", ["A_U", "delta_U"], "delta_A2^alpha,e2"),
    (["delta_U", "A_U"], "delta_A1", "delta_A1"),
    ("delta_A1", ["delta_U", "A_U"], "delta_A1"),
]


def _as_list(x):
    return x if isinstance(x, list) else [x]


def test_criterion_11_concatenation_table():
    rng = np.random.default_rng(11)
    bad_rows = []
    for row, (first, second, result) in enumerate(CONCAT_TABLE, start=1):
        for f1_name in _as_list(first):
            for f2_name in _as_list(second):
                got = {gs.form_class(gs.concat(make(rng, f1_name), make(rng, f2_name)), 1e-9) for _ in range(20)}
                if got != {result}:
                    bad_rows.append(f"row {row} {f1_name} after {f2_name} gives {sorted(got)}")

    families = ["gf", "A_U", "delta1", "delta2", "delta_U", "delta_A2^alpha", "delta_A2^e2", "delta_A1"]
    t_err = rel_err = 0.0
    pairs = skipped = 0
    while pairs < 1000:
        f1, f2 = make(rng, rng.choice(families)), make(rng, rng.choice(families))
        try:
            f = gs.concat(f1, f2)
        except gs.NonIntegrable:
            skipped += 1
            continue
        pairs += 1
        t1, t2, tf = gs.tuple_from_form(f1), gs.tuple_from_form(f2), gs.tuple_from_form(f)
        t_err = max(t_err, float(np.linalg.norm(tf.t - t1.t @ t2.t)))
        composed = t1.then(t2)
        scale = 1 + max(np.max(np.abs(composed.n)), np.max(np.abs(composed.tau)))
        rel_err = max(rel_err, float(max(np.max(np.abs(tf.n - composed.n)),
                                         np.max(np.abs(tf.tau - composed.tau))) / scale))
    ok = not bad_rows and t_err <= 1e-9 and rel_err <= 1e-9
    report(11, ok,
           f"{12 - len({b.split()[1] for b in bad_rows})}/12 table rows reproduced"
           f"{' (' + '; '.join(bad_rows) + ')' if bad_rows else ''}; "
           f"max ||T_f - T1 T2|| = {t_err:.1e}, relative N/tau err {rel_err:.1e} over {pairs} pairs "
           f"({skipped} non-integrable pairs redrawn)")


# -- 12: first-order generator is a pure commutator ---------------------------------------------


def test_criterion_12_first_order_generator():
    rng = np.random.default_rng(12)
    worst = 0.0
    for i in range(100):
        d_e = (2, 3, 4)[i % 3]
        a = rng.normal(size=(2 * d_e, 2 * d_e)) + 1j * rng.normal(size=(2 * d_e, 2 * d_e))
        b = rng.normal(size=(d_e, d_e)) + 1j * rng.normal(size=(d_e, d_e))
        rho_e = b @ b.conj().T
        rho_e /= np.trace(rho_e)
        g = dm.exact_first_order_generator(a + a.conj().T, rho_e)
        worst = max(worst, float(np.linalg.norm(lb.hg_decomposition(g).g)))
    report(12, worst <= 1e-10, f"max ||G|| = {worst:.1e} over 100 Hamiltonians with d_E in (2, 3, 4)")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted((k, v) for k, v in dict(globals()).items() if k.startswith("test_criterion_")):
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
