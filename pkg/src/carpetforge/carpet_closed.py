"""Closed-form square-well carpet and the WKB + Poisson propagator.

Coordinates are xi = x/L and tau = t/T_1. The Poisson image of a
Gaussian-weighted square-well packet is a sum over l of two travelling
Gaussians, centred on xi = +-2(tau + l), times a (1 - cos * sech)
modulation. Squaring term by term neglects interference between
different l, which holds while neighbouring pulses stay apart.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParams, NotISW, RegimeError, TurningPointTooClose
from .evolve import DensityGrid
from .numerics import simpson
from .spectra import turning_points

LOWER = "lower"
UPPER = "upper"


@dataclass(frozen=True)
class CarpetClosedParams:
    nbar: int
    delta_n: float
    t1_over_t2: float = None
    L: float = 1.0
    l_window: tuple = None

    def __post_init__(self):
        if self.nbar < 1 or not self.delta_n > 0:
            raise BadParams("need nbar >= 1 and delta_n > 0")
        if self.t1_over_t2 is None:
            object.__setattr__(self, "t1_over_t2", 1.0 / (2 * self.nbar))

    @classmethod
    def from_basis(cls, basis, nbar, delta_n, **kw):
        if basis.kind != "ISW":
            raise NotISW("the closed-form carpet needs the infinite square well")
        e1 = basis.energy_derivative(nbar, 1)
        e2 = basis.energy_derivative(nbar, 2)
        ratio = (e2 / 2) / e1
        if abs(ratio - 1 / (2 * nbar)) > 1e-12:
            raise BadParams("T_1/T_2 does not match 1/(2 nbar)")
        return cls(nbar, float(delta_n), ratio, basis.params["L"], **kw)

    @property
    def a(self):
        return 1.0 / (2 * self.delta_n ** 2)

    @property
    def T1(self):
        return self.L ** 2 / (math.pi * self.nbar)

    def sigma(self, tau):
        """sigma(tau) = sqrt(a^2 + f^2), f = 2 pi (T_1/T_2) tau."""
        f = 2 * math.pi * self.t1_over_t2 * np.asarray(tau, dtype=float)
        return np.sqrt(self.a ** 2 + f * f)

    def xi_width(self, tau):
        """Standard deviation in xi of one travelling Gaussian."""
        return math.sqrt(2) * self.delta_n * self.sigma(tau) / math.pi

    def window(self, tau_min, tau_max):
        if self.l_window is not None:
            return range(self.l_window[0], self.l_window[1] + 1)
        pad = 2 + int(math.ceil(5 * float(self.xi_width(max(abs(tau_min), abs(tau_max))))))
        return range(-int(math.ceil(tau_max)) - pad, -int(math.floor(tau_min)) + pad + 1)


def carpet_terms(params, xi, tau, l):
    """(travelling Gaussian pair, modulation) of term l, unnormalized."""
    a = params.a
    s2 = params.sigma(tau) ** 2
    u = tau + l
    pre = math.pi ** 2 * a / 2 / s2
    gauss = np.exp(-pre * (xi - 2 * u) ** 2) + np.exp(-pre * (xi + 2 * u) ** 2)
    phase = math.pi * (xi / params.t1_over_t2
                       - 4 * math.pi ** 2 * params.t1_over_t2 * tau * xi * u / s2)
    arg = 2 * math.pi ** 2 * a * xi * u / s2
    mod = 1 - np.cos(phase) / np.cosh(np.clip(arg, -700, 700))
    return gauss, mod


def _raw(params, xi, tau, ls):
    xi, tau = np.broadcast_arrays(np.asarray(xi, dtype=float), np.asarray(tau, dtype=float))
    out = np.zeros(xi.shape)
    for l in ls:
        g, m = carpet_terms(params, xi, tau, l)
        out += g * m
    return out * params.a / params.sigma(tau)


_NORMS = {}


def carpet_norm(params, samples=8001):
    """Constant making the integral of the density over [0, L] equal 1 at tau = 0."""
    key = (params.nbar, params.delta_n, params.t1_over_t2, params.L, params.l_window)
    if key not in _NORMS:
        xi = np.linspace(0.0, 1.0, samples)
        raw = _raw(params, xi, 0.0, params.window(0.0, 0.0))
        _NORMS[key] = 1.0 / (params.L * simpson(raw, xi[1] - xi[0]))
    return _NORMS[key]


def isw_carpet_closed(params, xi, tau, ls=None):
    """|Psi|^2 per unit length at (xi, tau) from the interference-free l-sum."""
    xi = np.asarray(xi, dtype=float)
    if np.any((xi < 0) | (xi > 1)):
        raise BadParams("xi must lie in [0, 1]")
    taus = np.asarray(tau, dtype=float)
    if ls is None:
        ls = params.window(float(np.min(taus)), float(np.max(taus)))
    return carpet_norm(params) * _raw(params, xi, tau, ls)


def carpet_grid(params, xi, tau, valid_below=0.5):
    """Closed-form grid on xi x tau with a validity mask and a term counter."""
    xi = np.asarray(xi, dtype=float)
    tau = np.asarray(tau, dtype=float)
    ls = params.window(float(tau.min()), float(tau.max()))
    vals = isw_carpet_closed(params, xi[None, :], tau[:, None], ls)
    mask = np.broadcast_to(xi[None, :] < valid_below, vals.shape).copy()
    meta = {"kind": "isw_closed", "terms": int(tau.size * xi.size * len(ls)),
            "l_window": [ls.start, ls.stop - 1], "nbar": params.nbar,
            "delta_n": params.delta_n}
    return DensityGrid(xi * params.L, tau * params.T1, vals, meta, mask)


def sech_gauss_alpha(A):
    """alpha(A) = arcsech(exp(-A^2/2)), so sech(alpha) meets the Gaussian at A sigma."""
    A = float(A)
    if not A > 0:
        raise BadParams("A must be positive")
    e = math.exp(-A * A / 2)
    return math.log((1 + math.sqrt(-math.expm1(-A * A))) / e)


def dephase_curve(params, xi, A=1.0, branch=LOWER):
    """tau(xi) at which the sech envelope reaches the travelling Gaussian."""
    if branch not in (LOWER, UPPER):
        raise BadParams("branch must be 'lower' or 'upper'")
    xi = np.asarray(xi, dtype=float)
    if np.any((xi <= 0) | (xi > 1)):
        raise BadParams("xi must lie in (0, 1]")
    al = sech_gauss_alpha(A)
    root = math.sqrt(1 + 2 * al / (A * A))
    shape = 1 + al / (A * A) + (root if branch == UPPER else -root)
    dn = params.delta_n
    rad = (math.pi * A * xi / al) ** 2 * shape - 1 / (2 * dn * dn)
    if np.any(rad < 0):
        raise RegimeError("negative radicand: packet not resolved at this xi")
    tau = math.sqrt(2) / (4 * math.pi * dn) / params.t1_over_t2 * np.sqrt(rad)
    return float(tau) if tau.ndim == 0 else tau


def ripple_map(grid_values, xi, nbar, floor=0.05):
    """Relative amplitude of the fast xi-ripple of wavelength 1/nbar.

    Each row is divided by its running mean over one ripple wavelength;
    the ripple is the running maximum of the deviation from 1. Points
    where the smoothed density is below ``floor`` of the row maximum
    are set to 0.
    """
    v = np.asarray(grid_values, dtype=float)
    dx = xi[1] - xi[0]
    w = max(3, int(round(1.0 / (nbar * dx))) | 1)
    ker = np.ones(w) / w
    out = np.zeros_like(v)
    for i, row in enumerate(v):
        smooth = np.convolve(row, ker, mode="same")
        dev = np.abs(row / np.where(smooth > 0, smooth, 1.0) - 1)
        peak = np.array([dev[max(0, j - w // 2): j + w // 2 + 1].max() for j in range(row.size)])
        keep = smooth >= floor * smooth.max()
        keep[: w] = False
        keep[-w:] = False
        out[i] = np.where(keep, peak, 0.0)
    return out


def first_ripple(ripples, xi, tau, level):
    """Earliest tau per xi column with ripple >= level (nan if none)."""
    hit = ripples >= level
    first = np.full(xi.size, np.nan)
    for j in range(xi.size):
        idx = np.nonzero(hit[:, j])[0]
        if idx.size:
            first[j] = tau[idx[0]]
    return first


def ridge_onset(values, xi, tau, nbar, A=1.0):
    """First tau per xi column at which an interference ridge is present.

    A ridge is a relative ripple of at least exp(-A^2/2) inside the A-sigma
    core of a pulse (smoothed density at least exp(-A^2/2) of the row
    maximum); this is the overlap the dephasing curve describes.
    """
    e = math.exp(-A * A / 2)
    return first_ripple(ripple_map(values, xi, nbar, floor=e), xi, tau, e)


def isw_carpet_amplitude(params, xi, tau, ls=None):
    """Coherent Poisson sum Psi(xi, tau), interference between l included.

    Uses the same constant as ``isw_carpet_closed`` so |Psi|^2 is
    directly comparable; the global phase follows the l-sum.
    """
    xi, tau = np.broadcast_arrays(np.asarray(xi, dtype=float), np.asarray(tau, dtype=float))
    if ls is None:
        ls = params.window(float(np.min(tau)), float(np.max(tau)))
    a = params.a
    b = math.pi * xi / (2 * params.t1_over_t2)
    c = math.pi * xi
    d = 2 * math.pi * tau
    al = a + 2j * math.pi * params.t1_over_t2 * tau
    out = np.zeros(xi.shape, dtype=complex)
    for l in ls:
        g = 2 * math.pi * l
        out += (np.exp(1j * b - (c - (d + g)) ** 2 / (4 * al))
                - np.exp(-1j * b - (c + (d + g)) ** 2 / (4 * al)))
    return np.sqrt(carpet_norm(params) * a / al) * out


# -- WKB + Poisson -------------------------------------------------------------

@dataclass
class WkbExpansion:
    """Per-x Taylor data of a Gaussian packet around nbar."""
    x: np.ndarray
    phase: tuple      # (S0, S1, S2) of S_{nbar+k}(x) - theta
    amp: tuple        # (h0, h1) of N_k / sqrt(p_k(x))
    energy: tuple     # (E1, E2)
    alternating: bool
    sigma: float
    norm: float = 1.0
    counts: dict = field(default_factory=dict)


def _kin(basis):
    return getattr(basis, "kin", 1.0)


def _wkb_action(basis, n, x):
    """S_n(x) = integral from the left turning point to x of p_n, and normalization."""
    from scipy import integrate as sint
    E = basis.energy(n)
    kin = _kin(basis)
    x_l, x_r = turning_points(basis, E)
    if basis.kind == "ISW":
        p = math.sqrt(E / kin)
        return p * (np.asarray(x) - x_l), math.sqrt(2 * p / (x_r - x_l)), p * np.ones_like(x)
    c = 0.5 * (x_l + x_r)
    h = 0.5 * (x_r - x_l)

    def p_at(y):
        d = (E - np.asarray(basis.V(y), dtype=float)) / kin
        return np.sqrt(np.clip(d, 0, None))

    def g(u):
        return float(p_at(c - h * math.cos(u))) * h * math.sin(u)

    def ginv(u):
        return h * math.sin(u) / max(float(p_at(c - h * math.cos(u))), 1e-300)
    S = []
    for xv in np.atleast_1d(x):
        um = math.acos(min(1.0, max(-1.0, (c - xv) / h)))
        S.append(sint.quad(g, 0.0, um, epsabs=1e-13, epsrel=1e-13, limit=400)[0])
    period, _ = sint.quad(ginv, 0.0, math.pi, epsabs=1e-12, epsrel=1e-12, limit=400)
    return np.array(S), math.sqrt(2.0 / period), p_at(np.atleast_1d(x))


def wkb_expansion(basis, packet, x, dn=0.1, margin=0.05):
    """Taylor coefficients in k of phase, amplitude and energy at each x."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n0 = packet.nbar
    x_l, x_r = turning_points(basis, basis.energy(n0))
    gap = margin * (x_r - x_l)
    if np.any(x < x_l + gap) or np.any(x > x_r - gap):
        raise TurningPointTooClose(
            f"x must stay {margin:.0%} of the well width inside [{x_l:.6g}, {x_r:.6g}]")
    hard = basis.kind == "ISW"
    theta = math.pi / 2 if hard else math.pi / 4
    S, N, P = {}, {}, {}
    for j in (-2, -1, 0, 1, 2):
        S[j], N[j], P[j] = _wkb_action(basis, n0 + j * dn, x)
    amp = {j: N[j] / np.sqrt(P[j]) for j in S}
    S0 = S[0] - theta
    S1 = (S[-2] - 8 * S[-1] + 8 * S[1] - S[2]) / (12 * dn)
    S2 = (-S[-2] + 16 * S[-1] - 30 * S[0] + 16 * S[1] - S[2]) / (12 * dn * dn)
    h0 = amp[0]
    h1 = (amp[-2] - 8 * amp[-1] + 8 * amp[1] - amp[2]) / (12 * dn)
    E1 = basis.energy_derivative(n0, 1)
    E2 = basis.energy_derivative(n0, 2)
    alt = _alternates(basis, packet)
    sigma = _packet_sigma(packet)
    return WkbExpansion(x, (S0, S1, S2), (h0, h1), (E1, E2), alt, sigma)


def _packet_sigma(packet):
    w = packet.info.get("sigma_n") if isinstance(packet.info, dict) else None
    if w is None:
        k = np.asarray(packet.k, dtype=float)
        c2 = np.abs(np.asarray(packet.c)) ** 2
        w = math.sqrt(2 * np.sum(c2 * k * k) / np.sum(c2))
    return float(w)


def _alternates(basis, packet):
    """True if exact eigenfunction signs near the left turning point alternate with n."""
    n0 = packet.nbar
    ns = [m for m in (n0 - 1, n0, n0 + 1) if basis.n_min <= m and (basis.n_max is None or m <= basis.n_max)]
    x_l, x_r = turning_points(basis, basis.energy(n0))
    xs = x_l + 1e-3 * (x_r - x_l)
    signs = [math.copysign(1.0, float(basis.eigenfunction(m)(xs))) for m in ns]
    return all(signs[i] != signs[i + 1] for i in range(len(signs) - 1))


def _gauss_moments(alpha, beta):
    """integral of (1, k) exp(-alpha k^2 + beta k) over the real line."""
    base = np.sqrt(np.pi / alpha) * np.exp(beta * beta / (4 * alpha))
    return base, base * beta / (2 * alpha)


def _poisson_eval(exp, t, extra_l=6):
    S0, S1, S2 = exp.phase
    h0, h1 = exp.amp
    E1, E2 = exp.energy
    shift = math.pi if exp.alternating else 0.0
    q = 1.0 / (2 * exp.sigma ** 2)
    total = np.zeros(exp.x.shape, dtype=complex)
    terms = 0
    for sgn in (1, -1):
        alpha = q - 1j * sgn * S2 / 2 + 1j * E2 * t / 2
        centre = (sgn * S1 + shift - E1 * t) / (2 * math.pi)
        ls = range(int(math.floor(np.min(centre))) - extra_l, int(math.ceil(np.max(centre))) + extra_l + 1)
        for l in ls:
            beta = 1j * (sgn * S1 + shift - E1 * t - 2 * math.pi * l)
            m0, m1 = _gauss_moments(alpha, beta)
            total += 0.5 * np.exp(1j * sgn * S0) * (h0 * m0 + h1 * m1)
            terms += exp.x.size
    exp.counts["terms"] = exp.counts.get("terms", 0) + terms
    return total


def _packet_c0(packet):
    ks = list(packet.k)
    if 0 not in ks:
        raise BadParams("the WKB recipe expands around a packet centred on nbar")
    return complex(packet.c[ks.index(0)])


def wkb_poisson_propagate(basis, packet, x, t, expansion=None):
    """Psi(x, t) up to a global phase from the Taylor-expanded WKB recipe.

    Each WKB state N_k cos(S_k - theta)/sqrt(p_k) is unit normalized, so the
    overall constant is the packet's own central coefficient c_0; the
    Gaussian profile exp(-k^2/2 sigma^2) carries the rest.
    """
    x = np.asarray(x, dtype=float)
    exp = expansion or wkb_expansion(basis, packet, x)
    exp.norm = _packet_c0(packet)
    out = exp.norm * _poisson_eval(exp, float(t))
    return out if x.ndim else out[0]


def wkb_poisson_grid(basis, packet, x, t):
    """|Psi|^2 on x by t from one shared Taylor expansion."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    exp = wkb_expansion(basis, packet, x)
    vals = np.array([np.abs(wkb_poisson_propagate(basis, packet, x, tt, exp)) ** 2 for tt in t])
    meta = {"kind": "wkb_poisson", "terms": exp.counts.get("terms", 0)}
    return DensityGrid(x, t, vals, meta, np.ones(vals.shape, dtype=bool))
