import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from divischan import chanrep as cr
from divischan import lindblad as lb


def dephasing_generator(gamma):
    return np.diag([0.0, -gamma, -gamma, 0.0])


def random_ccp_generator(rng):
    h = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    return lb.build_generator(0.3 * (h + h.conj().T), 0.2 * a @ a.conj().T)


def test_principal_log_of_positive_pauli_channel():
    lam = 0.7
    logs = lb.real_logarithms(np.diag([1, lam, lam, lam**2]))
    assert logs[0].branch_tag == "principal"
    np.testing.assert_allclose(logs[0].m, np.diag([0, math.log(lam), math.log(lam), 2 * math.log(lam)]), atol=1e-12)
    # the degenerate pair also admits rotation branches
    assert len(logs) == 7


def test_log_of_negative_pair():
    logs = lb.real_logarithms(np.diag([1, -0.6, -0.6, 0.5]))
    m = logs[0].m
    np.testing.assert_allclose(np.diag(m)[1:3], math.log(0.6))
    assert abs(m[1, 2]) == pytest.approx(math.pi)
    assert m[1, 2] == pytest.approx(-m[2, 1])
    for g in logs:
        np.testing.assert_allclose(expm(g.m), np.diag([1, -0.6, -0.6, 0.5]), atol=1e-10)


def test_log_of_complex_pair():
    a, b, c = 0.3, 0.2, 0.5
    e = np.array([[1, 0, 0, 0], [0, a, -b, 0], [0, b, a, 0], [0, 0, 0, c]])
    logs = lb.real_logarithms(e)
    assert logs
    m = logs[0].m
    np.testing.assert_allclose(np.diag(m)[1:3], 0.5 * math.log(0.13), atol=1e-12)
    assert m[2, 1] == pytest.approx(math.atan2(b, a))
    for g in logs:
        np.testing.assert_allclose(expm(g.m), e, atol=1e-10)


def test_no_real_log_for_single_negative_eigenvalue():
    assert lb.real_logarithms(np.diag([1, 0.5, 0.4, -0.3])) == []
    assert lb.principal_logarithm(np.diag([1, 0.5, 0.4, -0.3])) is None


def test_log_of_non_unital_channel_roundtrips():
    e = cr.ptm_from_blocks([0.1, 0, 0.2], np.diag([0.6, 0.5, 0.4]))
    g = lb.principal_logarithm(e)
    np.testing.assert_allclose(lb.exp_generator(g), e, atol=1e-10)


@pytest.mark.parametrize(
    "l, expected",
    [
        (dephasing_generator(1.0), True),
        (np.diag([0, math.log(0.6), math.log(0.8), math.log(0.9)]), False),
        (np.zeros((4, 4)), True),
    ],
)
def test_is_ccp(l, expected):
    assert lb.is_ccp(l) is expected


def test_ccp_spectrum_is_half_the_rates():
    rng = np.random.default_rng(11)
    for _ in range(20):
        l = random_ccp_generator(rng)
        np.testing.assert_allclose(np.sort(lb.ccp_spectrum(l)), np.sort(lb.hg_decomposition(l).rates) / 2, atol=1e-12)


def test_hg_decomposition_of_dephasing():
    d = lb.hg_decomposition(dephasing_generator(1.0))
    np.testing.assert_allclose(d.h, 0, atol=1e-12)
    np.testing.assert_allclose(d.g, np.diag([0, 0, 1.0]), atol=1e-12)
    np.testing.assert_allclose(d.rates, [1, 0, 0], atol=1e-12)


def test_hg_decomposition_of_hamiltonian_generator():
    d = lb.hg_decomposition(lb.build_generator(cr.SZ / 2, np.zeros((3, 3))))
    np.testing.assert_allclose(d.g, 0, atol=1e-12)
    np.testing.assert_allclose(d.h, cr.SZ / 2, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_build_and_decompose_roundtrip(seed):
    rng = np.random.default_rng(seed)
    h = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    h = h + h.conj().T
    h -= np.trace(h) / 2 * np.eye(2)  # the identity part of H is pure gauge
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    g = a @ a.conj().T
    d = lb.hg_decomposition(lb.build_generator(h, g))
    np.testing.assert_allclose(d.h, h, atol=1e-10)
    np.testing.assert_allclose(d.g, g, atol=1e-10)
    assert np.all(d.rates >= -1e-12)


def test_build_generator_dephasing_and_rotation():
    np.testing.assert_allclose(lb.build_generator(np.zeros((2, 2)), np.diag([0, 0, 1.0])).m, dephasing_generator(1.0))
    rot = lb.build_generator(cr.SZ / 2, np.zeros((3, 3)))
    u = expm(-0.5j * 0.8 * cr.SZ)  # i[rho, H] = -i[H, rho]
    np.testing.assert_allclose(lb.exp_generator(rot, 0.8), cr.unitary_ptm(u), atol=1e-12)


def test_build_generator_rejects_bad_input():
    with pytest.raises(ValueError):
        lb.build_generator(np.eye(3), np.zeros((3, 3)))
    with pytest.raises(ValueError, match="Hermitian"):
        lb.build_generator(np.array([[0, 1], [0, 0]]), np.zeros((3, 3)))


def test_exp_generator():
    np.testing.assert_allclose(lb.exp_generator(np.zeros((4, 4)), 3.0), np.eye(4))
    t = 0.37
    np.testing.assert_allclose(lb.exp_generator(dephasing_generator(2.0), t), np.diag([1, math.exp(-2 * t), math.exp(-2 * t), 1]))
    with pytest.raises(ValueError):
        lb.exp_generator(np.zeros((4, 4)), -1.0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(min_value=0.05, max_value=0.99), min_size=3, max_size=3))
def test_exp_log_roundtrip_for_positive_pauli_channels(lam):
    e = cr.pauli_channel(lam)
    np.testing.assert_allclose(lb.exp_generator(lb.principal_logarithm(e)), e, atol=1e-10)


def test_culver_screen():
    assert lb.culver_screen(np.diag([0.5, -0.4, -0.4]))
    assert not lb.culver_screen(np.diag([0.5, 0.4, -0.4]))
