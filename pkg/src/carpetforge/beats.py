"""Quantum beats f(t) = sum_k P_k exp 2 pi i (k t/T_1 + k^2 t/T_2).

Direct sums, Poisson-summed closed forms for Gaussian and flat (top-hat)
weights, the fractional-revival substitution, dephasing times and the
time-energy uncertainty product. Times are absolute; T_1 and T_2 carry
the units.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadParams, ImaginaryRoot, ErfOverflow
from .faddeeva import truncated_gaussian_integral
from .revivals import Fraction, _frac

GAUSSIAN = "gaussian"
TOPHAT = "tophat"


@dataclass(frozen=True)
class BeatSpec:
    """Weights and timescales of a two-timescale beat signal.

    ``width`` is Delta n for Gaussian weights and the half-width N for the
    top-hat. ``edges`` and ``sqrt_prefactor`` select the top-hat closed
    form variant, see ``tophat_limits``.
    """

    distribution: str
    width: float
    T1: float = 1.0
    T2: float = 200.0
    nbar: int = 40
    sqrt_prefactor: bool = False
    edges: str = "cell"

    def __post_init__(self):
        d = str(self.distribution).lower().replace("-", "").replace("_", "")
        if d in ("gaussian", "gauss", "gaussiann"):
            d = GAUSSIAN
        elif d in ("tophat", "flat"):
            d = TOPHAT
        else:
            raise BadParams(f"unknown distribution {self.distribution!r}")
        object.__setattr__(self, "distribution", d)
        if not self.width > 0:
            raise BadParams("distribution width must be positive")
        if self.edges not in ("cell", "literal"):
            raise BadParams("edges must be 'cell' or 'literal'")
        if not abs(self.T1) < abs(self.T2):
            raise BadParams("closed forms assume |T_1| < |T_2|")

    @property
    def ratio(self):
        return self.T2 / self.T1

    def ks(self):
        if self.distribution == TOPHAT:
            N = int(self.width)
            return np.arange(-N, N + 1)
        reach = int(math.ceil(8 * self.width))
        lo = max(-reach, 1 - self.nbar)
        return np.arange(lo, reach + 1)

    def weights(self):
        k = self.ks()
        if self.distribution == TOPHAT:
            return np.full(k.shape, 1.0 / k.size)
        d = self.width
        return np.exp(-k * k / (2 * d * d)) / math.sqrt(2 * math.pi * d * d)


def _inv(T):
    return 0.0 if math.isinf(T) else 1.0 / T


def beat_signal_direct(spec, t):
    t = np.asarray(t, dtype=float)
    k = spec.ks().astype(float)
    P = spec.weights()
    tt = np.atleast_1d(t)
    out = np.zeros(tt.shape, dtype=complex)
    f1, f2 = _inv(spec.T1), _inv(spec.T2)
    for kk, pk in zip(k, P):
        out += pk * np.exp(2j * math.pi * (kk * f1 + kk * kk * f2) * tt)
    return out if t.ndim else out[0]


# -- Gaussian closed form ----------------------------------------------------

def gaussian_widths(spec, t):
    """(sigma_r, sigma_i) in units of T_1 at time t."""
    d = spec.width
    tau2 = np.asarray(t, dtype=float) * _inv(spec.T2)
    sr = np.sqrt(1.0 / (4 * math.pi ** 2 * d * d) + 4 * d * d * tau2 * tau2)
    with np.errstate(divide="ignore"):
        si2 = 1.0 / (16 * math.pi ** 3 * d ** 4 * tau2) + tau2 / math.pi
    si = np.where(tau2 == 0, np.inf, np.sqrt(np.abs(si2)) * np.sign(si2))
    return sr, si


def gaussian_term(width, u, tau2):
    """One Poisson term: (1 - i b)^{-1/2} exp(-2 pi^2 D^2 u^2 / (1 - i b)), b = 4 pi D^2 tau2."""
    beta = 4 * math.pi * width * width * tau2
    den = 1 - 1j * beta
    return den ** -0.5 * np.exp(-2 * math.pi ** 2 * width * width * u * u / den)


def _l_window(center, half):
    return range(int(math.floor(center - half)), int(math.ceil(center + half)) + 1)


def gaussian_beats_closed(spec, t, reach=8.0):
    """sum_l of Gaussian pulses; returns (value, sigma_r, sigma_i).

    The l-window keeps every pulse within ``reach`` sigma_r of t/T_1, so the
    dropped pulses are below exp(-reach^2/2) ~ 1e-14 relative.
    """
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    sr, si = gaussian_widths(spec, tt)
    tau1 = tt / spec.T1
    tau2 = tt * _inv(spec.T2)
    out = np.zeros(tt.shape, dtype=complex)
    for i, (u0, s2, s) in enumerate(zip(tau1, tau2, sr)):
        ls = np.array(list(_l_window(u0, reach * s)), dtype=float)
        out[i] = np.sum(gaussian_term(spec.width, u0 - ls, s2))
    if np.ndim(t) == 0:
        return out[0], float(sr[0]), float(si[0])
    return out, sr, si


# -- top-hat closed form -------------------------------------------------------

def tophat_limits(spec):
    """Integration half-width and prefactor of the top-hat closed form.

    Integrating over [-N-1/2, N+1/2] with weight 1/(2N+1) is the Poisson
    image of the discrete flat sum (each integer owns a unit cell). The
    ``literal`` edges [-N, N] with 1/(2N) drop half a cell at each end and
    ``sqrt_prefactor`` further swaps in 1/sqrt(2 pi N^2).
    """
    N = float(spec.width)
    edge = N if spec.edges == "literal" else N + 0.5
    if spec.sqrt_prefactor:
        return edge, 1.0 / math.sqrt(2 * math.pi * N * N)
    return edge, 1.0 / (2 * edge)


def tophat_term(spec, u, tau2):
    """prefactor * integral exp 2 pi i (u x + tau2 x^2) dx over the top-hat cell."""
    edge, pref = tophat_limits(spec)
    u, tau2 = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(tau2, dtype=float))
    val = truncated_gaussian_integral(-2j * math.pi * tau2, 2j * math.pi * u, edge)
    if not np.all(np.isfinite(val)):
        raise ErfOverflow("non-finite error-function evaluation")
    return pref * val


def tophat_window(spec, tau1, margin=3):
    """Signal indices l whose pulse can reach t = tau1 * T_1."""
    r = 2 * spec.width * abs(spec.T1 * _inv(spec.T2))
    a, b = sorted((tau1 * (1 - r), tau1 * (1 + r)))
    return range(int(math.floor(a)) - margin, int(math.ceil(b)) + margin + 1)


def tophat_beats_closed(spec, t, margin=3):
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    tau1 = tt / spec.T1
    r = 2 * spec.width * abs(spec.T1 * _inv(spec.T2))
    span = int(math.ceil(np.max(np.abs(tau1)) * r)) + margin + 1
    base = np.floor(tau1)
    ls = base[:, None] + np.arange(-span, span + 1)[None, :]
    vals = tophat_term(spec, tau1[:, None] - ls, (tt * _inv(spec.T2))[:, None])
    out = vals.sum(axis=1)
    return out if np.ndim(t) else out[0]


def tophat_edges(spec, l):
    """Predicted edges t_1, t_2 (units of T_1) of pulse l: l / (1 +- 2N T_1/T_2)."""
    r = 2 * spec.width * spec.T1 * _inv(spec.T2)
    return l / (1 + r), l / (1 - r)


def tophat_plateau(spec, t):
    """Stationary-phase amplitude of a flat pulse, 1/((2N+1) sqrt(2|t/T_2|))."""
    tau2 = np.abs(np.asarray(t, dtype=float) * _inv(spec.T2))
    return 1.0 / ((2 * int(spec.width) + 1) * np.sqrt(2 * tau2))


def extract_edges(spec, l, t=None, signal=None, samples=20001):
    """Measured edges of pulse l: the contiguous stretch around t = l T_1
    on which |f| stays above half the stationary-phase plateau."""
    if t is None:
        t = spec.T1 * np.linspace(l - 0.45, l + 0.45, samples)
    t = np.asarray(t, dtype=float)
    mag = np.abs(beat_signal_direct(spec, t) if signal is None else np.asarray(signal))
    ok = mag >= 0.5 * tophat_plateau(spec, t)
    i = int(np.argmin(np.abs(t - l * spec.T1)))
    if not ok[i]:
        raise BadParams(f"pulse {l} not resolved at its centre")
    lo, hi = i, i
    while lo > 0 and ok[lo - 1]:
        lo -= 1
    while hi < t.size - 1 and ok[hi + 1]:
        hi += 1
    return t[lo] / spec.T1, t[hi] / spec.T1


# -- dephasing and uncertainty ----------------------------------------------------

def dephase_time(spec, q=1):
    """Dephasing time in units of T_1 for the early (q=1) or p/q revival."""
    q = int(q)
    if q < 1:
        raise BadParams("q must be >= 1")
    ratio = abs(spec.ratio)
    if spec.distribution == TOPHAT:
        return ratio / (8 * spec.width * q)
    d = spec.width
    rad = 1 - 1 / (q * q * math.pi ** 2 * d * d)
    if rad < 0:
        raise ImaginaryRoot("q^2 pi^2 dn^2 < 1: packet too narrow for this estimate")
    return ratio / (8 * d) / q * math.sqrt(rad)


def uncertainty_product(spec):
    """Delta t * Delta E = 2 pi (T_2/T_1 + 2 nbar) with hbar = 1."""
    w = spec.width
    dt = spec.T2 / (2 * w)
    dE = 4 * math.pi * w * (1 / spec.T1 + 2 * spec.nbar / spec.T2)
    return dt * dE


# -- fractional revivals ------------------------------------------------------

@dataclass(frozen=True)
class FractionalTime:
    fraction: Fraction
    l_int: int
    epsilon: float
    j: int
    T1: float
    T2: float

    @property
    def t(self):
        return self.l_int * self.T1

    def check(self):
        f = self.fraction
        return abs(self.l_int * self.T1 - (f.p / f.q * self.T2 + self.epsilon * self.T1))


def fractional_time(spec, fraction):
    f = _frac(fraction)
    x = f.p / f.q * spec.ratio
    l_int = int(math.floor(x + 0.5))
    eps = l_int - x
    j = f.q // 2 if f.q % 4 == 0 else f.q
    return FractionalTime(f, l_int, eps, j, spec.T1, spec.T2)


def w_weights(fraction, j):
    """W_k = (1/j) sum_r exp 2 pi i (r^2 p/q + r k/j), k = 0..j-1."""
    f = _frac(fraction)
    p, q = f.p, f.q
    r = np.arange(j, dtype=np.int64)
    k = r[:, None]
    den = q * j
    num = ((r * r * p * j)[None, :] + k * r[None, :] * q) % den
    return np.exp(2j * np.pi * num / den).sum(axis=1) / j


def fractional_terms(spec, fraction, dt, reach=8.0, margin=3):
    """(k values, W_k, S_k(dt)) for the substituted closed form."""
    ft = fractional_time(spec, fraction)
    j = ft.j
    W = w_weights(ft.fraction, j)
    u0 = dt / spec.T1
    tau2 = (ft.epsilon + u0) * spec.T1 * _inv(spec.T2)
    if spec.distribution == GAUSSIAN:
        sr = math.sqrt(1 / (4 * math.pi ** 2 * spec.width ** 2) + 4 * spec.width ** 2 * tau2 ** 2)
        ks = np.array(list(_l_window(j * u0, j * reach * sr)), dtype=int)
        S = gaussian_term(spec.width, u0 - ks / j, tau2)
    else:
        half = 2 * (spec.width + 0.5) * abs(tau2) + margin
        ks = np.array(list(_l_window(j * u0, j * half)), dtype=int)
        S = tophat_term(spec, u0 - ks / j, tau2)
    return ks, W[ks % j], S


def fractional_beat_signal(spec, fraction, dt):
    """f(t_{p/q} + dt) from sum_k W_k S_k(dt)."""
    dts = np.atleast_1d(np.asarray(dt, dtype=float))
    out = np.array([np.sum(Wk * Sk) for _, Wk, Sk in
                    (fractional_terms(spec, fraction, d) for d in dts)])
    return out if np.ndim(dt) else out[0]


def rel_l2(a, b, shape_only=False):
    a = np.asarray(a)
    b = np.asarray(b)
    if shape_only:
        a = a / np.linalg.norm(a)
        b = b / np.linalg.norm(b)
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))
