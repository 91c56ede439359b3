import math
from fractions import Fraction as Q
from math import gcd

import numpy as np
import pytest

from carpetforge import Eigenbasis, Fraction, make_coefficients, psi_direct
from carpetforge import revivals as R
from carpetforge.errors import BoundaryTooClose


def test_periods():
    assert R.revival_period(Fraction(1, 5)) == (5, R.ODD)
    assert R.revival_period(Fraction(1, 4)) == (2, R.MULTI2)
    assert R.revival_period(Fraction(1, 2)) == (2, R.ONE2)


def test_listed_coefficients():
    a = R.revival_coefficients(Fraction(1, 5)).a
    assert np.allclose(np.abs(a), 1 / math.sqrt(5), atol=1e-14)
    a = R.revival_coefficients(Fraction(1, 2)).a
    assert abs(a[0]) < 1e-15 and a[1] == pytest.approx(1.0, abs=1e-15)
    a = R.revival_coefficients(Fraction(1, 4)).a
    assert a[0] == pytest.approx((1 - 1j) / 2, abs=1e-15)
    assert a[1] == pytest.approx((1 + 1j) / 2, abs=1e-15)


def _brute_coefficients(p, q, l):
    """a_s from projecting exp(-2 pi i n^2 p/q) onto the l-periodic phases exp(2 pi i n s/l).

    This asks for sum_s a_s exp(-2 pi i n s / l) = exp(-2 pi i n^2 p / q) for all n.
    """
    n = np.arange(l * q * 4)
    target = np.exp(-2j * np.pi * (n * n * p % q) / q)
    M = np.exp(-2j * np.pi * np.outer(n, np.arange(l)) / l)
    a, *_ = np.linalg.lstsq(M, target, rcond=None)
    return a, np.max(np.abs(M @ a - target))


@pytest.mark.parametrize("p,q", [(1, 3), (2, 5), (1, 6), (3, 8), (5, 12), (1, 7), (3, 10)])
def test_against_least_squares(p, q):
    dec = R.revival_coefficients(Fraction(p, q))
    a, resid = _brute_coefficients(p, q, dec.l)
    assert resid < 1e-10
    assert np.allclose(a, dec.a, atol=1e-10)


def test_zero_fraction_is_identity():
    dec = R.revival_coefficients(Fraction(0, 1))
    assert dec.l == 1 and dec.a[0] == pytest.approx(1.0)
    isw = Eigenbasis("ISW")
    pk = make_coefficients("GaussianN", 20, 2.0, basis=isw)
    assert R.isw_translation_decomposition(pk, Fraction(0, 1)) == [(0.0, dec.a[0])]


def test_half_is_a_mirror():
    parts = R.isw_translation_decomposition(None, Fraction(1, 2), L=1.0)
    assert len(parts) == 1 and parts[0][0] == 1.0 and parts[0][1] == pytest.approx(1.0)


def test_psi_cl_at_zero_is_initial_state():
    isw = Eigenbasis("ISW")
    pk = make_coefficients("GaussianN", 40, 2.0, basis=isw)
    x = np.linspace(0, 1, 64)
    assert np.allclose(R.psi_cl(isw, pk, x, 0.0), psi_direct(isw, pk, x, 0.0), atol=1e-13)


def test_paired_form_matches(p=3, q=7):
    isw = Eigenbasis("ISW")
    pk = make_coefficients("GaussianN", 40, 2.0, basis=isw)
    x = np.linspace(0, 1, 64)
    for f in (Fraction(3, 7), Fraction(1, 6), Fraction(1, 4)):
        a = R.reconstruct_at_fraction(isw, pk, f, 0.0, x)
        b = R.reconstruct_at_fraction(isw, pk, f, 0.0, x, paired=True)
        assert np.max(np.abs(a - b)) < 1e-12


def test_residual_single_mode_and_boundary():
    isw = Eigenbasis("ISW")
    pk = make_coefficients("Explicit", 7, coeffs={7: 1.0}, basis=isw)
    x = np.linspace(0.1, 0.9, 17)
    assert np.max(R.psi_cl_residual(isw, pk, x, 0.3)) < 1e-6 * R.residual_scale(isw, pk, x, 0.3)
    with pytest.raises(BoundaryTooClose):
        R.psi_cl_residual(isw, pk, np.array([1e-6]), 0.0)


def test_residual_without_correction_is_large():
    isw = Eigenbasis("ISW")
    pk = make_coefficients("GaussianN", 20, 2.0, basis=isw)
    x = np.linspace(0.2, 0.8, 13)
    full = R.psi_cl_residual(isw, pk, x, 0.01)
    bare = R.psi_cl_residual(isw, pk, x, 0.01, correction=False)
    assert np.max(bare) > 1e3 * np.max(full)


def _brute_farey(n):
    return sorted({Q(p, q) for q in range(1, n + 1) for p in range(q + 1)})


@pytest.mark.parametrize("n", [1, 2, 3, 7, 13])
def test_farey_against_brute_force(n):
    got = [Q(f.p, f.q) for f in R.farey_sequence(n)]
    assert got == _brute_farey(n)


def test_farey_examples():
    assert [str(f) for f in R.farey_sequence(3)] == ["0/1", "1/3", "1/2", "2/3", "1/1"]
    assert [str(f) for f in R.farey_sequence(1)] == ["0/1", "1/1"]
    assert len(R.farey_listing(8)) == 17


def test_mediant():
    assert R.mediant(Fraction(1, 3), Fraction(1, 2)) == Fraction(2, 5)
    assert R.mediant(Fraction(0, 1), Fraction(1, 1)) == Fraction(1, 2)
    m = R.mediant(Fraction(3, 8), Fraction(2, 5))
    assert m == Fraction(5, 13)
    seq = R.farey_sequence(13)
    i = seq.index(m)
    assert seq[i - 1] == Fraction(3, 8) and seq[i + 1] == Fraction(2, 5)


def test_totient():
    assert [R.totient(k) for k in range(1, 13)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]
    assert all(R.totient(k) == sum(1 for j in range(1, k + 1) if gcd(j, k) == 1) for k in range(1, 60))
