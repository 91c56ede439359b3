import math

import numpy as np
import pytest
from scipy import integrate, special

from carpetforge import numerics
from carpetforge.faddeeva import shifted_erfc, truncated_gaussian_integral, wofz
from carpetforge.polynomials import hermite_functions, jacobi, jacobi_sum, laguerre


def test_wofz_reflection():
    z = np.array([0.3 - 2j, -4 + 0.1j, 7 - 7j])
    assert np.allclose(wofz(z), 2 * np.exp(-z * z) - wofz(-z), rtol=1e-13)


def test_shifted_erfc_both_half_planes():
    z = np.array([0.5 + 0.2j, -1.5 + 0.7j])
    shift = np.array([0.3 + 0.1j, -0.2j])
    got = shifted_erfc(z, shift, shift - z * z)
    assert np.allclose(got, np.exp(shift) * special.erfc(z), rtol=1e-13)


@pytest.mark.parametrize("a,b", [(0.3 + 0.5j, 2j), (1e-14, 1.5j), (2.0 - 0.1j, -1 + 3j), (0j, 0.4j)])
def test_truncated_gaussian_integral(a, b):
    N = 3.0
    f = lambda x, part: part(np.exp(-a * x * x + b * x))  # noqa: E731
    want = (integrate.quad(f, -N, N, args=(np.real,), epsabs=1e-13)[0]
            + 1j * integrate.quad(f, -N, N, args=(np.imag,), epsabs=1e-13)[0])
    got = truncated_gaussian_integral(np.array([a]), np.array([b]), N)[0]
    assert abs(got - want) < 1e-10 * max(1.0, abs(want))


def test_hermite_functions_are_orthonormal_at_high_order():
    x = np.linspace(-40, 40, 16001)
    H = hermite_functions(300, x)
    G = numerics.simpson(H[[0, 150, 299, 300]][:, None, :] * H[[0, 150, 299, 300]][None, :, :], x[1] - x[0])
    assert np.max(np.abs(G - np.eye(4))) < 1e-9


def test_laguerre_and_jacobi_against_scipy():
    x = np.linspace(-0.9, 0.9, 7)
    for n, a, b in ((0, 1.0, 2.0), (3, 0.5, 1.5), (7, 2.0, -0.5)):
        assert np.allclose(jacobi(n, a, b, x), special.eval_jacobi(n, a, b, x), rtol=1e-12, atol=1e-13)
        assert np.allclose(jacobi_sum(n, a, b, x), special.eval_jacobi(n, a, b, x), rtol=1e-11, atol=1e-12)
    y = np.linspace(0, 10, 9)
    for n, k in ((0, 1.0), (4, 2.5), (9, 0.0)):
        assert np.allclose(laguerre(n, k, y), special.eval_genlaguerre(n, k, y), rtol=1e-12, atol=1e-12)


def test_jacobi_complex_parameters():
    # Rodrigues-free check: the three-term sum and the explicit sum agree for complex a, b
    x = np.linspace(-0.5, 0.5, 5) * 1j + 0.2
    a, b = 1.5 - 2j, 1.5 + 2j
    assert np.allclose(jacobi(5, a, b, x), jacobi_sum(5, a, b, x), rtol=1e-11)


def test_numerics():
    x = np.linspace(0, math.pi, 1001)
    assert numerics.simpson(np.sin(x), x[1] - x[0]) == pytest.approx(2.0, abs=1e-11)
    assert numerics.integrate(np.exp, 0, 1) == pytest.approx(math.e - 1, rel=1e-12)
    assert numerics.d1(np.sin, 0.4, 1e-3) == pytest.approx(math.cos(0.4), rel=1e-10)
    assert numerics.d2(np.sin, 0.4, 1e-2) == pytest.approx(-math.sin(0.4), rel=1e-7)
    assert numerics.complex_step(lambda z: z ** 3, 2.0) == pytest.approx(12.0, rel=1e-15)
