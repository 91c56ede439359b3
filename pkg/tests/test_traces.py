import math

import numpy as np
import pytest

from carpetforge import Eigenbasis, make_coefficients, psi_direct, timescales
from carpetforge import revivals
from carpetforge import traces as T
from carpetforge.errors import EmptyPacket, NoZeroPoint, VelocityZeroCrossing
from carpetforge.spectra import turning_points


@pytest.fixture(scope="module")
def isw():
    return Eigenbasis("ISW")


@pytest.fixture(scope="module")
def flat10(isw):
    return make_coefficients("Explicit", 5, coeffs={n: 1.0 for n in range(1, 11)}, basis=isw)


def test_isw_velocities(isw):
    v = T.intermode_velocities(isw, 3, 2, 0.4)
    assert sorted(np.round(v, 12)) == sorted(np.round([math.pi, -math.pi, 5 * math.pi, -5 * math.pi], 12))
    d = T.intermode_velocities(isw, 4, 4, 0.4)
    assert math.isnan(d[0]) and math.isnan(d[1])
    assert sorted(d[2:]) == pytest.approx([-8 * math.pi, 8 * math.pi])


def test_velocity_sign_symmetry():
    m = Eigenbasis("Morse")
    for n, k in ((5, 2), (9, 1)):
        v = T.intermode_velocities(m, n, k, 0.1)
        assert sorted(v) == pytest.approx(sorted(-x for x in v))


def test_isw_entries_are_exact(isw):
    pk = make_coefficients("Explicit", 25, coeffs={n: 1.0 for n in range(1, 51)}, basis=isw)
    for e in T.velocity_entries(isw, pk):
        s1, s2 = e.signs
        assert e.v_at_v0 == pytest.approx(s1 * math.pi * (e.n - s2 * e.m), rel=1e-12, abs=1e-12)


def test_pi_bundle(isw, flat10):
    b = T.find_bundle(T.speed_bundles(isw, flat10), math.pi)
    assert sorted({(n, m) for n, m, _ in b.pairs()}) == [(n + 1, n) for n in range(1, 10)]
    assert len(b) == 9


def test_grouping_tolerance_is_stable(isw, flat10):
    a = T.degeneracy_bundles(isw, flat10, tol=1e-6)
    b = T.degeneracy_bundles(isw, flat10, tol=1e-9)
    assert [x.pairs() for x in a] == [x.pairs() for x in b]


def test_multimode_diagonal(isw, flat10):
    x = np.linspace(0, 1, 21)
    a = T.multimode_term(isw, flat10, 4, 4, x, 0.0)
    b = T.multimode_term(isw, flat10, 4, 4, x, 0.37)
    assert np.allclose(a, b, atol=1e-15)
    assert np.allclose(a, 0.1 * isw.eigenfunction(4)(x) ** 2, atol=1e-15)


@pytest.mark.parametrize("kind,nbar,lo,hi", [("ISW", 8, 0.0, 1.0), ("Morse", 5, -1.0, 3.0),
                                             ("SHO", 6, -5.0, 5.0)])
def test_partition(kind, nbar, lo, hi):
    b = Eigenbasis(kind)
    pk = make_coefficients("GaussianN", nbar, 2.0, basis=b)
    x = np.linspace(lo, hi, 121)
    t = np.linspace(0, 2 * abs(timescales(b, nbar).T_cl), 9)
    level = 0.5 if kind == "SHO" else 0.0
    if kind == "Morse":
        level = "min"
    diag, parts = T.partition_density(b, pk, x, t, v_ref=level)
    full = np.abs(psi_direct(b, pk, x, t)) ** 2
    assert np.max(np.abs(diag + sum(parts.values()) - full)) < 1e-10


def test_zero_point_required():
    with pytest.raises(NoZeroPoint):
        T.reference_level(Eigenbasis("SHO", omega=1.0), -1.0)


def test_trajectories(isw):
    pts = T.trace_trajectory(isw, math.pi, 0.0, +1, samples=11)
    assert all(t == pytest.approx(x / math.pi, abs=1e-13) for x, t in pts)
    nbar = 20
    Tcl = timescales(isw, nbar).T_cl
    crossing = T.trace_trajectory(isw, 2 * math.pi * nbar, 0.0, +1, samples=3)[-1][1]
    assert crossing == pytest.approx(Tcl / 2, rel=1e-12)
    m = Eigenbasis("Morse")
    with pytest.raises(VelocityZeroCrossing):
        T.trace_trajectory(m, 0.0, 0.5)


def test_classical_path_overlays_psi_cl_ridge():
    m = Eigenbasis("Morse", A=40.0, alpha=1.0)
    nbar = 15
    pk = make_coefficients("GaussianN", nbar, 2.0, basis=m)
    Tcl = abs(timescales(m, nbar).T_cl)
    E = m.energy(nbar)
    a, b = turning_points(m, E)
    step = Tcl / 256
    t = np.arange(129) * step
    x = np.linspace(a + 0.3 * (b - a), b - 0.3 * (b - a), 60)
    ridge = t[np.argmax(np.abs(revivals.psi_cl(m, pk, x, t)) ** 2, axis=0)]
    tc = np.linspace(0, Tcl / 2, 2001)
    xc = T.classical_path(m, E, tc, b, -1)
    t_path = np.interp(x, xc[::-1], tc[::-1])
    assert np.max(np.abs(ridge - t_path)) <= 2 * step


def test_quadratize():
    sho = Eigenbasis("SHO")
    flat = make_coefficients("Explicit", 41, coeffs={n: 1.0 for n in range(1, 82)}, basis=sho)
    sq = T.quadratize(flat)
    assert sorted(sq.n.tolist()) == [k * k for k in range(1, 10)]
    assert np.allclose(np.abs(sq.c) ** 2, 1 / 9, atol=1e-15)
    with pytest.raises(EmptyPacket):
        T.quadratize(make_coefficients("Explicit", 2, coeffs={2: 1.0, 3: 1.0}, basis=sho))
    big = [b for b in T.degeneracy_bundles(sho, sq, v_ref=0.5) if len(b) >= 3]
    assert big


def test_bundle_weights(isw, flat10):
    for b in T.degeneracy_bundles(isw, flat10):
        assert b.weight == pytest.approx(0.1 * len(b.members))
