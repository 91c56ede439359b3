"""Quadrature and finite-difference helpers shared across modules."""

import numpy as np

from .errors import QuadratureFail

DEFAULT_PANELS = 4096


def simpson(values, h):
    """Composite Simpson rule on an odd number of equally spaced samples."""
    values = np.asarray(values)
    n = values.shape[-1]
    if n < 3 or n % 2 == 0:
        raise ValueError("simpson needs an odd number of samples >= 3")
    return h / 3.0 * (values[..., 0] + values[..., -1]
                      + 4.0 * values[..., 1:-1:2].sum(axis=-1)
                      + 2.0 * values[..., 2:-1:2].sum(axis=-1))


def integrate(f, a, b, panels=DEFAULT_PANELS, tol=1e-10, max_panels=2 ** 20):
    """Integrate a vectorized ``f`` over [a, b] with panel doubling.

    The panel count doubles until two successive Simpson estimates agree to
    ``tol`` (relative to max(1, |I|)). Returns the last estimate.
    """
    n = int(panels)
    x = np.linspace(a, b, n + 1)
    prev = simpson(f(x), (b - a) / n)
    while n < max_panels:
        n *= 2
        x = np.linspace(a, b, n + 1)
        cur = simpson(f(x), (b - a) / n)
        if np.all(np.abs(cur - prev) <= tol * np.maximum(1.0, np.abs(cur))):
            return cur
        prev = cur
    raise QuadratureFail(f"no convergence on [{a}, {b}] with {n} panels")


def d1(f, x, h):
    """Fourth-order central first derivative of a callable."""
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


def d2(f, x, h):
    """Fourth-order central second derivative of a callable."""
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x)
            + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h)


def grid_d1(y, h):
    """Fourth-order first derivative of samples; one-sided 4th order at the ends."""
    y = np.asarray(y)
    out = np.empty_like(y)
    out[2:-2] = (-y[4:] + 8 * y[3:-1] - 8 * y[1:-3] + y[:-4]) / (12 * h)
    out[0] = (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]) / (12 * h)
    out[1] = (-3 * y[0] - 10 * y[1] + 18 * y[2] - 6 * y[3] + y[4]) / (12 * h)
    out[-1] = (25 * y[-1] - 48 * y[-2] + 36 * y[-3] - 16 * y[-4] + 3 * y[-5]) / (12 * h)
    out[-2] = (3 * y[-1] + 10 * y[-2] - 18 * y[-3] + 6 * y[-4] - y[-5]) / (12 * h)
    return out


def complex_step(f, x, h=1e-20):
    """Derivative of a real-analytic ``f`` by the complex-step trick."""
    x = np.asarray(x, dtype=float)
    return np.imag(f(x + 1j * h)) / h
