"""Intermode decomposition of |Psi|^2, trace velocities and degeneracy bundles.

Each product psi_n psi_m is split exactly as
    psi_n psi_m = Re(Phi_n Phi_m^*)/2 + Re(Phi_n Phi_m)/2,
with Phi_n = psi_n + i chi_n and chi_n a local quadrature partner
(-psi_n' p_n / (p_n^2 + kappa^2)). The first piece carries wavenumber
p_n - p_m and moves with the fast (group-like) velocity, the second
carries p_n + p_m and moves slowly. For the square well the split is the
familiar cos((n -+ m) pi x) pair. Because the identity holds for any real
chi_n, bundle densities always add back to the full density.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction as Q

import numpy as np
from scipy import integrate as sint

from .errors import EmptyPacket, ForbiddenRegion, NoZeroPoint, VelocityZeroCrossing, BadParams
from .numerics import d1
from .spectra import turning_points
from .wavepacket import timescales, _finish

FULL = "full"
PSI_CL = "psi_cl"
FAST = -1   # (-_2) branch: denominator sqrt(E_n - V) - sqrt(E_m - V)
SLOW = +1   # (+_2) branch


def _kin(basis):
    return getattr(basis, "kin", 1.0)


def _coeff_map(packet):
    return {int(n): complex(c) for n, c in zip(packet.n, packet.c)}


def multimode_term(basis, packet, n, m, x, t):
    """mu_nm = (d_nm psi_n psi_m e^{-i t (E_n - E_m)} + c.c.)/2, d_nm = c_n c_m^*."""
    cm = _coeff_map(packet)
    if n not in cm or m not in cm:
        raise BadParams(f"modes {n}, {m} not in the packet")
    x = np.asarray(x, dtype=float)
    d = cm[n] * np.conj(cm[m])
    prod = basis.eigenfunction(n)(x) * basis.eigenfunction(m)(x)
    ph = np.exp(-1j * np.asarray(t, dtype=float) * (basis.energy(n) - basis.energy(m)))
    return np.real(d * ph) * prod


def intermode_velocities(basis, n, m, x):
    """Four velocities s1 (E_n - E_m) / (p_n + s2 p_m), ordered
    (s1, s2) = (+,+), (-,+), (+,-), (-,-), with p = sqrt((E - V)/kin).

    For n == m the (+2) pair has no phase motion and is returned as
    NaN; the (-2) pair is its 0/0 limit, +-2 kin p_n.
    """
    x = float(x)
    En, Em = basis.energy(n), basis.energy(m)
    v = float(basis.V(x))
    if not (En > v and Em > v):
        raise ForbiddenRegion(f"E_{n} or E_{m} below V({x:g})")
    k = _kin(basis)
    pn, pm = math.sqrt((En - v) / k), math.sqrt((Em - v) / k)
    out = []
    for s2 in (+1, -1):
        for s1 in (+1, -1):
            if n == m:
                out.append(float("nan") if s2 > 0 else s1 * 2 * k * pn)
            else:
                out.append(s1 * (En - Em) / (pn + s2 * pm))
    return out


@dataclass(frozen=True)
class VelocityEntry:
    n: int
    m: int
    signs: tuple
    v_at_v0: float
    wavenumber_at_v0: float

    @property
    def branch(self):
        return self.signs[1]


@dataclass
class VelocityBundle:
    velocity: float
    members: list = field(default_factory=list)
    weight: float = 0.0
    mode: str = FULL

    def pairs(self):
        """Distinct (n, m, branch) pieces carried by this bundle."""
        return sorted({(e.n, e.m, e.branch) for e in self.members})

    def __len__(self):
        return len(self.pairs())


def reference_level(basis, v_ref=0.0):
    """Check that V reaches ``v_ref`` ('min' uses the potential minimum)."""
    _, vmin = basis.potential_minimum()
    if v_ref == "min":
        return float(vmin)
    v_ref = float(v_ref)
    if vmin > v_ref + 1e-12 * max(1.0, abs(vmin)):
        raise NoZeroPoint(f"min V = {vmin:g} lies above the reference level {v_ref:g}; "
                          "pass v_ref='min' to shift")
    return v_ref


def _speeds(basis, packet, mode):
    ts = timescales(basis, packet.nbar, order=2) if mode == PSI_CL else None
    rate = 2 * math.pi / ts.T_cl if ts is not None else None
    return rate


def _exact_key(basis, packet, mode, n, m, s1, s2):
    """Rational key of v / (pi/L) for the square well (kin = 1)."""
    if basis.kind != "ISW" or _kin(basis) != 1.0:
        return None
    if mode == FULL:
        return Q(s1 * (n - s2 * m))
    nb = packet.nbar
    return Q(2 * nb * s1 * (n - m), n + s2 * m) if n + s2 * m != 0 else None


def velocity_entries(basis, packet, mode=FULL, v_ref=0.0):
    """All off-diagonal (n > m, s1, s2) entries with velocities at V = v_ref."""
    if mode not in (FULL, PSI_CL):
        raise BadParams("mode must be 'full' or 'psi_cl'")
    level = reference_level(basis, v_ref)
    rate = _speeds(basis, packet, mode)
    k = _kin(basis)
    ns = sorted(set(int(n) for n in packet.n))
    root = {}
    for n in ns:
        e = basis.energy(n) - level
        if e < -1e-12 * max(1.0, abs(level)):
            raise ForbiddenRegion(f"E_{n} lies below the reference level")
        root[n] = math.sqrt(max(e, 0.0) / k)
    entries = []
    for i, n in enumerate(ns):
        for m in ns[:i]:
            dE = basis.energy(n) - basis.energy(m) if mode == FULL else rate * (n - m)
            for s2 in (+1, -1):
                den = root[n] + s2 * root[m]
                for s1 in (+1, -1):
                    v = s1 * dE / den
                    kn = -s1 * (root[n] - s2 * root[m])
                    entries.append(VelocityEntry(n, m, (s1, s2), v, kn))
    return entries


def degeneracy_bundles(basis, packet, mode=FULL, v_ref=0.0, tol=1e-9, signed=True):
    """Group velocity entries into bundles of equal velocity at V = v_ref.

    Square-well velocities are compared as exact rationals of pi/L; other
    spectra use a relative tolerance ``tol``. ``signed=False`` groups by
    speed, which partitions the density (see ``bundle_density``).
    """
    entries = velocity_entries(basis, packet, mode, v_ref)
    cm = _coeff_map(packet)
    keyed = []
    for e in entries:
        key = _exact_key(basis, packet, mode, e.n, e.m, *e.signs)
        val = e.v_at_v0 if signed else abs(e.v_at_v0)
        if key is not None and not signed:
            key = abs(key)
        keyed.append((val, key, e))
    bundles = []
    if all(k is not None for _, k, _ in keyed):
        groups = {}
        for val, key, e in keyed:
            groups.setdefault(key, []).append((val, e))
        for key in sorted(groups):
            vals = [v for v, _ in groups[key]]
            bundles.append(VelocityBundle(float(np.mean(vals)), [e for _, e in groups[key]], mode=mode))
    else:
        keyed.sort(key=lambda r: r[0])
        scale = max(abs(r[0]) for r in keyed) if keyed else 1.0
        cur = []
        for val, _, e in keyed:
            if cur and abs(val - cur[-1][0]) > tol * max(abs(val), abs(cur[0][0]), 1e-300 + 0 * scale):
                bundles.append(VelocityBundle(float(np.mean([v for v, _ in cur])), [x for _, x in cur], mode=mode))
                cur = []
            cur.append((val, e))
        if cur:
            bundles.append(VelocityBundle(float(np.mean([v for v, _ in cur])), [x for _, x in cur], mode=mode))
    for b in bundles:
        b.weight = float(sum(abs(cm[e.n] * np.conj(cm[e.m])) for e in b.members))
    return bundles


def speed_bundles(basis, packet, mode=FULL, v_ref=0.0, tol=1e-9):
    return degeneracy_bundles(basis, packet, mode, v_ref, tol, signed=False)


def find_bundle(bundles, velocity, rel=1e-9):
    for b in bundles:
        if abs(b.velocity - velocity) <= rel * max(1.0, abs(velocity)):
            return b
    return None


# -- densities ----------------------------------------------------------------

class _Partners:
    """psi_n and chi_n tabulated on a grid."""

    def __init__(self, basis, ns, x):
        self.x = np.asarray(x, dtype=float)
        self.psi = {}
        self.phi = {}
        k = _kin(basis)
        V = np.asarray(basis.V(self.x), dtype=float) if basis.kind != "ISW" else np.zeros_like(self.x)
        for n in ns:
            ef = basis.eigenfunction(n)
            psi = ef(self.x)
            E = basis.energy(n)
            p = np.sqrt(np.clip((E - V) / k, 0.0, None))
            if basis.kind == "ISW":
                L = basis.params["L"]
                kn = n * math.pi / L
                dpsi = math.sqrt(2 / L) * kn * np.cos(kn * self.x)
                if float(ef(0.25 * L / n)) < 0:
                    dpsi = -dpsi
                chi = -dpsi / kn
            else:
                h = 1e-4 * max(1.0, float(np.max(np.abs(self.x))))
                dpsi = np.array([d1(ef, xv, h) for xv in self.x])
                kap = 0.05 * float(np.max(p)) if np.max(p) > 0 else 1.0
                chi = -dpsi * p / (p * p + kap * kap)
            self.psi[n] = psi
            self.phi[n] = psi + 1j * chi


def _piece(parts, n, m, branch):
    a, b = parts.phi[n], parts.phi[m]
    return 0.5 * np.real(a * np.conj(b)) if branch == FAST else 0.5 * np.real(a * b)


def _phase_rate(basis, packet, mode):
    if mode == FULL:
        return lambda n, m: basis.energy(n) - basis.energy(m)
    rate = 2 * math.pi / timescales(basis, packet.nbar, order=2).T_cl
    return lambda n, m: rate * (n - m)


def bundle_density(basis, packet, bundle, x, t, parts=None):
    """Partial density of the bundle's pieces on x for each t (shape (nt, nx))."""
    if not bundle.members:
        raise EmptyPacket("empty bundle")
    x = np.asarray(x, dtype=float)
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    cm = _coeff_map(packet)
    if parts is None:
        parts = _Partners(basis, sorted(cm), x)
    rate = _phase_rate(basis, packet, bundle.mode)
    out = np.zeros((tt.size, x.size))
    for n, m, br in bundle.pairs():
        d = cm[n] * np.conj(cm[m])
        shape = _piece(parts, n, m, br)
        out += 2 * np.real(d * np.exp(-1j * tt * rate(n, m)))[:, None] * shape[None, :]
    return out if np.ndim(t) else out[0]


def diagonal_density(basis, packet, x, parts=None):
    cm = _coeff_map(packet)
    x = np.asarray(x, dtype=float)
    total = np.zeros(x.shape)
    for n, c in cm.items():
        psi = parts.psi[n] if parts is not None else basis.eigenfunction(n)(x)
        total += abs(c) ** 2 * psi * psi
    return total


def partition_density(basis, packet, x, t, mode=FULL, v_ref=0.0, tol=1e-9):
    """(diagonal, {speed: bundle density}) on x by t."""
    cm = _coeff_map(packet)
    parts = _Partners(basis, sorted(cm), x)
    bundles = speed_bundles(basis, packet, mode, v_ref, tol)
    diag = diagonal_density(basis, packet, x, parts)
    return diag, {b.velocity: bundle_density(basis, packet, b, x, t, parts) for b in bundles}


def classify_velocities(basis, packet, x):
    """(fast |v| / v_gr list, slow |v| / v_gr list) over the packet window at x."""
    k = _kin(basis)
    vgr = 2 * k * math.sqrt((basis.energy(packet.nbar) - float(basis.V(x))) / k)
    ns = sorted(set(int(n) for n in packet.n))
    fast, slow = [], []
    for i, n in enumerate(ns):
        for m in ns[:i]:
            v = intermode_velocities(basis, n, m, x)
            slow += [abs(v[0]) / vgr, abs(v[1]) / vgr]
            fast += [abs(v[2]) / vgr, abs(v[3]) / vgr]
    return fast, slow


# -- trajectories --------------------------------------------------------------

def trace_velocity(basis, v_ref, x, level=0.0):
    """Local speed of a trace whose speed at V = level is |v_ref|.

    The trace follows the classical law v = 2 kin sqrt((E - V)/kin) with
    E fixed by v(level) = |v_ref|.
    """
    k = _kin(basis)
    E = level + k * (abs(v_ref) / (2 * k)) ** 2
    d = E - np.asarray(basis.V(x), dtype=float) if basis.kind != "ISW" else E * np.ones_like(np.asarray(x, dtype=float))
    return 2 * k * np.sqrt(np.clip(d / k, 0.0, None)), E


def trace_trajectory(basis, v_ref, x0, direction=+1, x=None, samples=201, level=0.0):
    """Samples (x, t(x)) of t(x) = integral from x0 of dx'/v(x').

    ``x`` defaults to ``samples`` points from x0 to the domain edge (or the
    turning point) in ``direction``. Raises VelocityZeroCrossing when a
    requested point lies at or past a turning point.
    """
    if v_ref == 0:
        raise VelocityZeroCrossing("zero reference velocity")
    direction = 1 if direction >= 0 else -1
    _, E = trace_velocity(basis, v_ref, x0, level)
    if basis.kind == "ISW":
        lo, hi = 0.0, basis.params["L"]
    else:
        lo, hi = turning_points(basis, E)
    if not lo < x0 < hi and not (basis.kind == "ISW" and lo <= x0 <= hi):
        raise VelocityZeroCrossing("x0 lies outside the classically allowed region")
    if x is None:
        end = hi if direction > 0 else lo
        x = np.linspace(x0, end, samples)
        if basis.kind != "ISW":
            x = x[:-1]
    x = np.asarray(x, dtype=float)
    if np.any((x - x0) * direction < 0):
        raise BadParams("trajectory samples must lie on the chosen side of x0")
    speed = lambda y: float(trace_velocity(basis, v_ref, y, level)[0])  # noqa: E731
    ts = []
    prev_x, acc = x0, 0.0
    for xv in x:
        if basis.kind != "ISW" and not (lo < xv < hi):
            raise VelocityZeroCrossing(f"turning point reached before x = {xv:g}")
        if xv != prev_x:
            val, _ = sint.quad(lambda y: 1.0 / speed(y), min(prev_x, xv), max(prev_x, xv),
                               epsabs=1e-13, epsrel=1e-12, limit=200)
            acc += val
        ts.append(acc)
        prev_x = xv
    return list(zip(x.tolist(), ts))


def classical_path(basis, E, t, x0, direction=+1):
    """x(t) of a classical particle (H = kin p^2 + V) bouncing between turning points."""
    k = _kin(basis)
    if basis.kind == "ISW":
        lo, hi = 0.0, basis.params["L"]
        v = 2 * math.sqrt(k * E)
        s = (x0 - lo) + direction * v * np.asarray(t, dtype=float)
        span = hi - lo
        s = np.mod(s, 2 * span)
        return lo + np.where(s <= span, s, 2 * span - s)
    lo, hi = turning_points(basis, E)

    def tof(a, b):
        c, h = 0.5 * (lo + hi), 0.5 * (hi - lo)
        ua = math.acos(min(1.0, max(-1.0, (c - a) / h)))
        ub = math.acos(min(1.0, max(-1.0, (c - b) / h)))

        def g(u):
            y = c - h * math.cos(u)
            dv = E - float(basis.V(y))
            if dv <= 1e-13 * max(1.0, abs(E)):
                return 0.0
            return h * math.sin(u) / (2 * math.sqrt(k * dv))
        return sint.quad(g, ua, ub, epsabs=1e-12, epsrel=1e-10, limit=400)[0]
    half = tof(lo, hi)
    grid = np.linspace(lo, hi, 2001)
    tt = np.array([0.0] + [tof(lo, g) for g in grid[1:]])
    # phase along the full orbit: lo -> hi in [0, half], hi -> lo in [half, 2 half]
    start = tof(lo, x0)
    s0 = start if direction > 0 else 2 * half - start
    s = np.mod(s0 + np.asarray(t, dtype=float), 2 * half)
    out = np.where(s <= half, np.interp(s, tt, grid), np.interp(2 * half - s, tt, grid))
    return out


# -- quadratization --------------------------------------------------------------

def quadratize(packet):
    """Keep only perfect-square quantum numbers, renormalized."""
    cm = _coeff_map(packet)
    kept = {n - packet.nbar: c for n, c in cm.items() if n >= 0 and math.isqrt(n) ** 2 == n}
    if not kept:
        raise EmptyPacket("no perfect squares in the packet")
    return _finish(packet.nbar, kept, "PerfectSquares", packet.window,
                   dict(packet.info, quadratized=True), n_floor=None)
