"""Wavepacket coefficient distributions and Taylor timescales of a spectrum."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import BadParams, EmptyPacket, ProjectionFail, ConfigError

PACKET_KINDS = ("GaussianN", "TopHat", "SpatialGaussian", "Explicit", "PerfectSquares")
DROP = 1e-12


@dataclass(frozen=True)
class PacketSpec:
    """Normalized coefficients c_{nbar+k}, stored as parallel tuples."""

    nbar: int
    ks: tuple
    cs: tuple
    kind: str = "Explicit"
    window: tuple = (0, 0)
    info: dict = field(default_factory=dict, compare=False)

    @property
    def n(self):
        return self.nbar + np.array(self.ks, dtype=int)

    @property
    def k(self):
        return np.array(self.ks, dtype=int)

    @property
    def c(self):
        return np.array(self.cs, dtype=complex)

    @property
    def coeffs(self):
        return dict(zip(self.ks, self.cs))

    def norm(self):
        return float(np.sum(np.abs(self.c) ** 2))

    def normalized(self):
        return _finish(self.nbar, dict(zip(self.ks, self.cs)), self.kind,
                       self.window, self.info, n_floor=None)

    @property
    def ident(self):
        ks = self.ks
        return f"{self.kind}(nbar={self.nbar},k=[{ks[0]},{ks[-1]}],modes={len(ks)})"

    def __len__(self):
        return len(self.ks)


def _finish(nbar, coeffs, kind, window, info=None, n_floor=1, n_ceiling=None):
    items = []
    for k, c in sorted(coeffs.items()):
        if n_floor is not None and nbar + k < n_floor:
            continue
        if n_ceiling is not None and nbar + k > n_ceiling:
            continue
        items.append((int(k), complex(c)))
    if not items:
        raise EmptyPacket(f"{kind}: no coefficients in window")
    mags = np.array([abs(c) for _, c in items])
    top = mags.max()
    if not top > 0 or not np.isfinite(top):
        raise EmptyPacket(f"{kind}: all coefficients vanish")
    items = [(k, c) for (k, c), m in zip(items, mags) if m > DROP * top]
    norm = math.sqrt(sum(abs(c) ** 2 for _, c in items))
    ks = tuple(k for k, _ in items)
    cs = tuple(c / norm for _, c in items)
    return PacketSpec(int(nbar), ks, cs, kind, tuple(window), dict(info or {}))


def make_coefficients(kind, nbar, width_param=None, window=None, *, basis=None,
                      x0=None, sigma_x=None, p0=0.0, coeffs=None, n_floor=None):
    """Build a normalized PacketSpec.

    kind: GaussianN (width_param = sigma_n), TopHat (width_param = N),
    SpatialGaussian (needs basis, x0, sigma_x), Explicit (coeffs: {n: c}),
    PerfectSquares (window = (n_lo, n_hi) in absolute quantum numbers).
    ``window`` is (k_min, k_max) relative to nbar except for PerfectSquares.
    When ``basis`` is given, modes outside its bound-state range are dropped.
    ``n_floor`` defaults to the basis ground state, or 1 without a basis.
    """
    kind = _kind(kind)
    top = None
    if basis is not None:
        n_floor = basis.n_min if n_floor is None else max(n_floor, basis.n_min)
        top = basis.n_max
    elif n_floor is None:
        n_floor = 1
    nbar = int(nbar)
    if nbar < 1 and kind != "Explicit":
        raise BadParams("nbar must be >= 1")
    if kind == "GaussianN":
        sig = float(width_param)
        if not sig > 0:
            raise BadParams("sigma_n must be positive")
        if window is None:
            reach = int(math.ceil(6 * sig))
            window = (-min(nbar - n_floor, reach), reach)
        ks = range(window[0], window[1] + 1)
        d = {k: math.exp(-k * k / (2 * sig * sig)) for k in ks}
        return _finish(nbar, d, kind, window, {"sigma_n": sig}, n_floor, top)
    if kind == "TopHat":
        N = int(width_param)
        if N < 0:
            raise BadParams("top-hat half-width must be >= 0")
        window = (-N, N) if window is None else window
        d = {k: 1.0 for k in range(window[0], window[1] + 1) if abs(k) <= N}
        return _finish(nbar, d, kind, window, {"N": N}, n_floor, top)
    if kind == "PerfectSquares":
        lo, hi = window if window is not None else (1, nbar)
        d = {}
        r = max(0, math.isqrt(max(lo, 0)))
        while r * r <= hi:
            if r * r >= lo and r * r >= n_floor:
                d[r * r - nbar] = 1.0
            r += 1
        if not d:
            raise EmptyPacket(f"no perfect squares in [{lo}, {hi}]")
        return _finish(nbar, d, kind, (lo, hi), {}, n_floor, top)
    if kind == "Explicit":
        if not coeffs:
            raise EmptyPacket("explicit packet without coefficients")
        d = {int(n) - nbar: c for n, c in coeffs.items()}
        ks = sorted(d)
        return _finish(nbar, d, kind, (ks[0], ks[-1]), {}, n_floor, top)
    return _spatial(basis, x0, sigma_x, p0, window, n_floor)


def _kind(kind):
    for k in PACKET_KINDS:
        if str(kind).lower().replace("_", "") == k.lower():
            return k
    aliases = {"gaussian": "GaussianN", "tophat": "TopHat", "flat": "TopHat",
               "spatial": "SpatialGaussian", "squares": "PerfectSquares"}
    key = str(kind).lower().replace("_", "").replace("-", "")
    if key in aliases:
        return aliases[key]
    raise ConfigError(f"unknown packet kind {kind!r}")


def _spatial(basis, x0, sigma_x, p0, window, n_floor, tol=1e-12, chunk=32):
    """Project exp(-(x-x0)^2/(2 sigma_x^2) + i p0 x) onto the eigenbasis."""
    if basis is None or x0 is None or sigma_x is None:
        raise BadParams("SpatialGaussian needs basis, x0 and sigma_x")
    sigma_x = float(sigma_x)
    x0 = float(x0)
    lo_d, hi_d = basis.domain
    lo = max(lo_d, x0 - 12 * sigma_x)
    hi = min(hi_d, x0 + 12 * sigma_x)

    def target(x):
        return np.exp(-(x - x0) ** 2 / (2 * sigma_x ** 2) + 1j * p0 * x)

    panels = 1 << max(10, int(math.ceil(math.log2((hi - lo) / sigma_x * 40))))
    target_norm = numerics.integrate(lambda x: np.abs(target(x)) ** 2, lo, hi)
    n_lo = max(basis.n_min, n_floor)
    top = basis.n_max
    if window is not None:
        n_lo, top = max(n_lo, window[0]), window[1]
    coeffs = {}
    captured = 0.0
    n = n_lo
    while True:
        stop = n + chunk - 1
        if top is not None:
            stop = min(stop, top)
        for m in range(n, stop + 1):
            ef = basis.eigenfunction(m)
            c = _project(ef, target, lo, hi, panels)
            coeffs[m] = c
            captured += abs(c) ** 2
        n = stop + 1
        done = captured >= (1 - tol) * target_norm
        exhausted = top is not None and n > top
        if window is None and (done or exhausted):
            break
        if window is not None and exhausted:
            break
        if n > 20000:
            raise ProjectionFail("projection did not capture the target norm")
    weights = np.array([abs(c) ** 2 for c in coeffs.values()])
    ns = np.array(list(coeffs))
    nbar = int(round(float(np.sum(ns * weights) / np.sum(weights))))
    nbar = max(nbar, n_lo)
    d = {m - nbar: c for m, c in coeffs.items()}
    info = {"x0": x0, "sigma_x": sigma_x, "p0": p0, "captured": captured / target_norm}
    return _finish(nbar, d, "SpatialGaussian", (n_lo - nbar, n - 1 - nbar), info, n_floor)


def _project(ef, target, lo, hi, panels, tol=1e-12, max_panels=1 << 22):
    a = max(lo, ef.support[0])
    b = min(hi, ef.support[1])
    if b <= a:
        return 0.0
    n = panels
    prev = None
    while n <= max_panels:
        x = np.linspace(a, b, n + 1)
        cur = numerics.simpson(ef(x) * target(x), (b - a) / n)
        if prev is not None and abs(cur - prev) <= tol:
            return complex(cur)
        prev = cur
        n *= 2
    raise ProjectionFail(f"projection onto n={ef.n} did not converge")


# -- timescales ---------------------------------------------------------

@dataclass(frozen=True)
class Timescales:
    """E at nbar and the signed periods T_1..T_J with 2 pi / T_j = E^(j)/j!."""

    nbar: int
    e_nbar: float
    periods: tuple
    order: int
    exact: bool

    def T(self, j):
        return self.periods[j - 1]

    @property
    def T_cl(self):
        return self.periods[0]

    @property
    def T_R(self):
        return self.periods[1]

    def rate(self, j):
        T = self.periods[j - 1]
        return 0.0 if math.isinf(T) else 2 * math.pi / T

    def taylor_energy(self, k):
        k = np.asarray(k, dtype=float)
        out = np.full(k.shape, self.e_nbar)
        for j in range(1, self.order + 1):
            out = out + self.rate(j) * k ** j
        return out


def lattice_derivative(energy, nbar, j):
    """Central j-th difference of E on the integer lattice around nbar."""
    coeffs = [(-1) ** i * math.comb(j, i) for i in range(j + 1)]
    if j % 2 == 0:
        return sum(c * float(energy(nbar + j // 2 - i)) for i, c in enumerate(coeffs))
    half = (j + 1) // 2
    total = 0.0
    for start in (nbar - half + 1, nbar - half):
        total += sum(c * float(energy(start + j - i)) for i, c in enumerate(coeffs))
    return 0.5 * total


def timescales(basis, nbar, order=3):
    if order < 2:
        raise BadParams("order must be >= 2")
    nbar = basis.check_n(nbar)
    exact = basis.is_polynomial
    periods = []
    for j in range(1, order + 1):
        if exact:
            d = basis.energy_derivative(nbar, j)
        else:
            d = lattice_derivative(basis.energy, nbar, j)
        rate = d / math.factorial(j)
        periods.append(math.inf if rate == 0 else 2 * math.pi / rate)
    return Timescales(nbar, float(basis.energy(nbar)), tuple(periods), order, exact)
