import math

import numpy as np
import pytest

from carpetforge import Fraction
from carpetforge import beats as B
from carpetforge.errors import BadParams, ImaginaryRoot


@pytest.fixture(scope="module")
def gauss():
    return B.BeatSpec("gaussian", 8, T1=1.0, T2=200.0)


@pytest.fixture(scope="module")
def flat():
    return B.BeatSpec("tophat", 8, T1=1.0, T2=200.0)


def test_trivial_signals():
    one = B.BeatSpec("tophat", 0.5, T2=200.0)   # N = 0: a single k = 0 term
    t = np.linspace(0, 3, 11)
    assert np.allclose(np.abs(B.beat_signal_direct(one, t)), 1.0, atol=1e-15)


def test_two_level_beat():
    spec = B.BeatSpec("gaussian", 1.0, T1=1.0, T2=math.inf)
    t = np.linspace(0, 2, 9)
    # hand-rolled two-term sum at k = 0, 1
    P0, P1 = 0.3, 0.7
    f = P0 + P1 * np.exp(2j * np.pi * t / spec.T1)
    assert np.allclose(np.abs(f) ** 2, P0 ** 2 + P1 ** 2 + 2 * P0 * P1 * np.cos(2 * np.pi * t))


def test_gaussian_width_at_zero(gauss):
    sr, _ = B.gaussian_widths(gauss, 0.0)
    assert sr ** 2 == pytest.approx(1 / (4 * math.pi ** 2 * 64), rel=1e-14)


def test_gaussian_closed_form(gauss):
    t = np.linspace(0, 5, 2000)
    closed, _, _ = B.gaussian_beats_closed(gauss, t)
    assert B.rel_l2(closed, B.beat_signal_direct(gauss, t)) < 1e-5


def test_single_gaussian_term_centre(gauss):
    for l in (1, 3):
        tau2 = l / gauss.T2
        v = B.gaussian_term(gauss.width, 0.0, tau2)
        assert abs(v) == pytest.approx(abs(1 - 4j * math.pi * 64 * tau2) ** -0.5, rel=1e-14)


def test_tophat_closed_form(flat):
    t = np.linspace(0.5, 1.5, 1001)
    assert B.rel_l2(B.tophat_beats_closed(flat, t), B.beat_signal_direct(flat, t)) < 5e-2
    t = np.linspace(0, 5, 2000)
    assert B.rel_l2(B.tophat_beats_closed(flat, t), B.beat_signal_direct(flat, t)) < 5e-3
    assert abs(B.tophat_beats_closed(flat, np.array([1e-9]))[0]) == pytest.approx(1.0, abs=1e-6)


def test_tophat_literal_variant_is_worse(flat):
    lit = B.BeatSpec("tophat", 8, T1=1.0, T2=200.0, edges="literal")
    t = np.linspace(0, 5, 2000)
    direct = B.beat_signal_direct(flat, t)
    assert B.rel_l2(B.tophat_beats_closed(lit, t), direct) > 0.1


def test_tophat_edges(flat):
    t1, t2 = B.tophat_edges(flat, 1)
    assert t1 == pytest.approx(1 / 1.08) and t2 == pytest.approx(1 / 0.92)
    got = B.extract_edges(flat, 1)
    assert got[0] == pytest.approx(t1, rel=0.02) and got[1] == pytest.approx(t2, rel=0.02)


def test_dephase_times(gauss, flat):
    assert B.dephase_time(gauss) == pytest.approx(3.1225, abs=1e-4)
    assert B.dephase_time(flat) == 3.125
    q5 = B.dephase_time(gauss, 5)
    assert 0.624 <= q5 <= 0.625
    with pytest.raises(ImaginaryRoot):
        B.dephase_time(B.BeatSpec("gaussian", 0.2, T2=200.0))
    with pytest.raises(BadParams):
        B.dephase_time(gauss, 0)


def test_uncertainty_product(gauss):
    assert B.uncertainty_product(gauss) == pytest.approx(2 * math.pi * 280, rel=1e-14)


@pytest.mark.parametrize("text", ["1/2", "1/3", "1/4", "2/5", "3/8", "1/6"])
def test_fractional_signal_gaussian(gauss, text):
    f = Fraction.parse(text)
    ft = B.fractional_time(gauss, f)
    dt = np.linspace(-0.6, 0.6, 241)
    got = B.fractional_beat_signal(gauss, f, dt)
    want = B.beat_signal_direct(gauss, ft.t + dt)
    assert B.rel_l2(got, want) < 1e-5


def test_fractional_signal_tophat(flat):
    f = Fraction(1, 3)
    ft = B.fractional_time(flat, f)
    dt = np.linspace(-0.6, 0.6, 241)
    assert B.rel_l2(B.fractional_beat_signal(flat, f, dt), B.beat_signal_direct(flat, ft.t + dt)) < 5e-2


def test_zero_fraction_is_early_form(gauss):
    dt = np.linspace(0.0, 2.0, 41)
    a = B.fractional_beat_signal(gauss, Fraction(0, 1), dt)
    b = B.gaussian_beats_closed(gauss, dt)[0]
    assert np.max(np.abs(a - b)) < 1e-12


def test_spec_validation():
    with pytest.raises(BadParams):
        B.BeatSpec("lorentz", 3)
    with pytest.raises(BadParams):
        B.BeatSpec("gaussian", 3, T1=5.0, T2=2.0)
