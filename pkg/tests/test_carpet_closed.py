import math

import numpy as np
import pytest

from carpetforge import Eigenbasis, make_coefficients, psi_direct, timescales
from carpetforge import carpet_closed as C
from carpetforge.beats import rel_l2
from carpetforge.errors import NotISW, RegimeError, TurningPointTooClose


@pytest.fixture(scope="module")
def well():
    isw = Eigenbasis("ISW")
    return isw, C.CarpetClosedParams.from_basis(isw, 30, 5.0)


def test_params(well):
    isw, p = well
    assert p.t1_over_t2 == pytest.approx(1 / 60, rel=1e-14)
    assert p.T1 == pytest.approx(timescales(isw, 30).T_cl, rel=1e-14)
    assert p.sigma(0.0) == pytest.approx(1 / 50)
    with pytest.raises(NotISW):
        C.CarpetClosedParams.from_basis(Eigenbasis("SHO"), 6, 2.0)


def test_closed_form_equals_incoherent_pulse_sum(well):
    _, p = well
    xi = np.linspace(0, 1, 201)[None, :]
    tau = np.linspace(0, 2, 21)[:, None]
    ls = p.window(0, 2)
    closed = C.isw_carpet_closed(p, xi, tau, ls)
    # each l on its own through the coherent amplitude, squared, then summed
    parts = sum(np.abs(C.isw_carpet_amplitude(p, xi, tau, [l])) ** 2 for l in ls)
    assert np.max(np.abs(closed - parts)) < 1e-12 * closed.max()


def test_amplitude_matches_direct(well):
    isw, p = well
    pk = make_coefficients("GaussianN", 30, 5.0, basis=isw)
    xi = np.linspace(0.01, 0.99, 99)
    for tau in (0.1, 0.7, 2.3):
        amp = C.isw_carpet_amplitude(p, xi, np.full(xi.shape, tau))
        d = np.abs(psi_direct(isw, pk, xi * p.L, tau * p.T1)) ** 2
        assert rel_l2(np.abs(amp) ** 2, d) < 1e-6


def test_normalization(well):
    _, p = well
    xi = np.linspace(0, 1, 4001)
    for tau in np.linspace(0, 2, 10):
        v = C.isw_carpet_closed(p, xi, tau)
        assert np.trapezoid(v, xi) == pytest.approx(1.0, abs=0.02)


def test_short_time_agreement(well):
    isw, p = well
    pk = make_coefficients("GaussianN", 30, 5.0, basis=isw)
    xi = np.linspace(0, 0.5, 121)
    tau = np.linspace(0, 1, 101)
    g = C.carpet_grid(p, xi, tau)
    d = np.abs(psi_direct(isw, pk, xi * p.L, tau * p.T1)) ** 2
    assert rel_l2(g.values, d) < 1e-3
    assert g.mask[:, :-1].all()


def test_modulation_bounded(well):
    _, p = well
    xi = np.linspace(0, 1, 301)[None, :]
    tau = np.linspace(0, 4, 81)[:, None]
    for l in p.window(0, 4):
        _, mod = C.carpet_terms(p, xi, tau, l)
        assert mod.min() >= -1e-15 and mod.max() <= 2 + 1e-15


def test_pulse_kinematics(well):
    _, p = well
    xi = np.linspace(0, 1, 2001)
    for tau in (0.1, 0.2, 0.3):
        g, _ = C.carpet_terms(p, xi, tau, 0)
        half = xi > 0.05
        peak = xi[half][np.argmax(g[half])]
        assert abs(peak - 2 * tau) <= 0.5 * (xi[1] - xi[0])


def test_classical_freezing():
    widths = [C.CarpetClosedParams(n, 5.0).sigma(0.5 * 30 / n) for n in (30, 100, 300)]
    s0 = C.CarpetClosedParams(30, 5.0).sigma(0.0)
    assert widths[0] > widths[1] > widths[2] > s0


def test_alpha_values():
    assert C.sech_gauss_alpha(2.0) == pytest.approx(2.6885, abs=1e-4)
    assert C.sech_gauss_alpha(1.0) == pytest.approx(1.0850, abs=1e-4)
    for A in (0.5, 1, 2, 3):
        assert 1 / math.cosh(C.sech_gauss_alpha(A)) == pytest.approx(math.exp(-A * A / 2), rel=1e-15)


def test_dephase_curve(well):
    _, p = well
    assert C.dephase_curve(p, 0.3) == pytest.approx(0.6186, abs=1e-4)
    p10 = C.CarpetClosedParams(30, 10.0)
    up5 = C.dephase_curve(p, 0.3, branch=C.UPPER)
    up10 = C.dephase_curve(p10, 0.3, branch=C.UPPER)
    assert up5 / up10 == pytest.approx(2.0, rel=0.01)
    with pytest.raises(RegimeError):
        C.dephase_curve(p, 0.05)


def test_term_count(well):
    isw, p = well
    g = C.carpet_grid(p, np.linspace(0, 1, 241), np.linspace(0, 4, 401))
    pairs = 241 * 401 * len(make_coefficients("GaussianN", 30, 5.0, basis=isw)) ** 2
    assert pairs >= 10 * g.meta["terms"]


def test_wkb_poisson_isw(well):
    isw, p = well
    pk = make_coefficients("GaussianN", 30, 5.0, basis=isw)
    x = np.linspace(0.05, 0.95, 181)
    exp = C.wkb_expansion(isw, pk, x)
    assert np.allclose(exp.phase[1], math.pi * x, atol=1e-10)
    for tau in (0.1, 0.25):
        w = np.abs(C.wkb_poisson_propagate(isw, pk, x, tau * p.T1, exp)) ** 2
        ref = np.abs(C.isw_carpet_amplitude(p, x, np.full(x.shape, tau), [0])) ** 2
        assert rel_l2(w, ref) < 1e-6


def test_wkb_poisson_morse():
    m = Eigenbasis("Morse", A=10.0, alpha=1.0)
    pk = make_coefficients("GaussianN", 4, 1.0, basis=m)
    a, b = __import__("carpetforge").spectra.turning_points(m, m.energy(4))
    gap = 0.15 * (b - a)
    x = np.linspace(a + gap, b - gap, 120)
    T = timescales(m, 4).T_cl
    t = np.linspace(0, T, 40)
    w = C.wkb_poisson_grid(m, pk, x, t).values
    d = np.abs(psi_direct(m, pk, x, t)) ** 2
    assert rel_l2(w, d) < 0.10
    with pytest.raises(TurningPointTooClose):
        C.wkb_expansion(m, pk, np.array([a + 0.01 * (b - a)]))
