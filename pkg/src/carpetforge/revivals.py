"""Fractional revivals: Gauss-sum coefficients, pairing, Psi_cl, Farey tools.

Conventions follow Psi(x, t) ~ sum_k c_k psi_k exp(-2 pi i (k t/T_1 + k^2 t/T_2)),
so with phi_k = (p/q) k^2 the coefficients are
a_m = (1/l) sum_k exp(-2 pi i (phi_k - m k / l)).
"""

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache, total_ordering

import numpy as np

from . import numerics
from .errors import BoundaryTooClose, NotISW, RecurrenceMismatch, BadParams
from .evolve import ModeTable, psi_direct
from .wavepacket import timescales

ODD = "Odd"
MULTI2 = "MultiplePowersOf2"
ONE2 = "OnePowerOf2"


@total_ordering
@dataclass(frozen=True, init=False)
class Fraction:
    """Reduced p/q with q >= 1; construction reduces automatically."""

    p: int
    q: int

    def __init__(self, p, q=1):
        p, q = int(p), int(q)
        if q == 0:
            raise BadParams("zero denominator")
        if q < 0:
            p, q = -p, -q
        g = math.gcd(p, q) or 1
        object.__setattr__(self, "p", p // g)
        object.__setattr__(self, "q", q // g)

    @classmethod
    def parse(cls, text):
        text = str(text).strip()
        if "/" in text:
            a, b = text.split("/", 1)
            return cls(int(a), int(b))
        return cls(int(text), 1)

    def __float__(self):
        return self.p / self.q

    def __lt__(self, other):
        return self.p * other.q < other.p * self.q

    def __str__(self):
        return f"{self.p}/{self.q}"

    def __repr__(self):
        return f"Fraction({self.p}, {self.q})"


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, tuple):
        return Fraction(*x)
    return Fraction.parse(x)


def _period_class(q):
    if q % 2 == 1:
        return q, ODD
    if q % 4 == 0:
        return q // 2, MULTI2
    return q, ONE2


def revival_period(fraction):
    """(l, q_class) for a reduced fraction, verified against phi_k."""
    f = _frac(fraction)
    p, q = f.p, f.q
    l, cls = _period_class(q)
    # phi_{k+l} - phi_k = p (2 k l + l^2) / q must be an integer
    for k in range(3 * l):
        if (p * (2 * k * l + l * l)) % q:
            raise RecurrenceMismatch(f"phi_k is not {l}-periodic for {f}")
    return l, cls


def _unit(num, den):
    """exp(2 pi i num/den) with exact reduction of num modulo den."""
    r = num % den
    return cmath.exp(2j * math.pi * r / den)


def direct_coefficients(fraction):
    f = _frac(fraction)
    p, q = f.p, f.q
    l, _ = revival_period(f)
    den = q * l
    k = np.arange(l, dtype=np.int64)
    m = k[:, None]
    # exponent numerators reduced exactly in integers before scaling
    num = (-(p * k * k * l)[None, :] + m * k[None, :] * q) % den
    vals = np.exp(2j * np.pi * num / den).sum(axis=1) / l
    return [complex(v) for v in vals]


def recurrent_coefficients(fraction, seed_value=None):
    """a_m from a_{m'} = a_m exp(2 pi i (m/l + p/q)), m' = m + 2pl/q mod l."""
    f = _frac(fraction)
    p, q = f.p, f.q
    l, cls = revival_period(f)
    step = (2 * p * l // q) % l if l > 1 else 0
    seed = 1 if cls == ONE2 else 0
    if seed_value is None:
        seed_value = direct_coefficients(f)[seed]
    a = [0j] * l
    m = seed
    val = seed_value
    for _ in range(l):
        a[m] = val
        val = val * _unit(m * q + p * l, l * q)
        m = (m + step) % l
        if m == seed:
            break
    return a


def pairing_map(fraction, n):
    f = _frac(fraction)
    p, q = f.p, f.q
    l, cls = _period_class(q)
    if cls == ODD:
        return (2 * p * n) % q
    if cls == MULTI2:
        return (p * n) % (q // 2)
    return (q // 2 + 2 * p * n) % q


@dataclass(frozen=True)
class RevivalDecomposition:
    fraction: Fraction
    l: int
    a: tuple
    q_class: str
    pairing: dict = field(compare=False)

    @property
    def h(self):
        return (self.l - 1) // 2 if self.l % 2 else self.l // 2

    def m_of(self, n):
        return pairing_map(self.fraction, n)


@lru_cache(maxsize=4096)
def _coeffs(p, q, tol):
    f = Fraction(p, q)
    l, cls = revival_period(f)
    direct = direct_coefficients(f)
    rec = recurrent_coefficients(f, direct[1 if cls == ONE2 else 0])
    worst = max(abs(x - y) for x, y in zip(direct, rec))
    if worst > tol:
        raise RecurrenceMismatch(f"{f}: direct and recurrent a_m differ by {worst:.3g}")
    # vanishing coefficients come out as round-off; make them exact zeros
    return l, cls, tuple(0j if abs(a) < 1e-13 else a for a in direct)


def revival_coefficients(fraction, tol=1e-12):
    f = _frac(fraction)
    l, cls, a = _coeffs(f.p, f.q, tol)
    pairing = {n: pairing_map(f, n) for n in range(-l, l + 1)}
    return RevivalDecomposition(f, l, a, cls, pairing)


# -- Psi_cl and reconstructions ------------------------------------------

def _tcl(basis, packet):
    return timescales(basis, packet.nbar).T_cl


def psi_cl(basis, packet, x, t, T_cl=None):
    """sum_k c_k psi_k(x) exp(-2 pi i k t / T_cl)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    T = _tcl(basis, packet) if T_cl is None else T_cl
    table = ModeTable(basis, packet, x)
    rates = 2 * math.pi * packet.k / T
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    rows = np.array([table.row(tt, rates=rates) for tt in ts])
    return rows[0] if np.ndim(t) == 0 else rows


def reconstruct_at_fraction(basis, packet, fraction, dt, x, paired=False):
    """sum_s a_s Psi_cl(x, (p/q) T_2 + dt + (s/l) T_1).

    ``paired`` uses the symmetric form: s = 0 once, s and l - s together,
    and for even l the s = l/2 slice once.
    """
    dec = revival_coefficients(fraction)
    ts = timescales(basis, basis.check_n(packet.nbar))
    T1, T2 = ts.T_cl, ts.T_R
    f = dec.fraction
    x = np.atleast_1d(np.asarray(x, dtype=float))
    table = ModeTable(basis, packet, x)
    rates = 2 * math.pi * packet.k / T1
    t0 = f.p / f.q * T2 + dt if f.p else dt
    l = dec.l
    total = np.zeros(x.shape, dtype=complex)
    if not paired:
        for s in range(l):
            if dec.a[s] != 0:
                total += dec.a[s] * table.row(t0 + s / l * T1, rates=rates)
        return total
    total += dec.a[0] * table.row(t0, rates=rates) if dec.a[0] != 0 else 0
    top = (l - 1) // 2
    for s in range(1, top + 1):
        if dec.a[s] != 0:
            total += dec.a[s] * (table.row(t0 + s / l * T1, rates=rates)
                                 + table.row(t0 - s / l * T1, rates=rates))
    if l % 2 == 0 and dec.a[l // 2] != 0:
        total += dec.a[l // 2] * table.row(t0 + 0.5 * T1, rates=rates)
    return total


def isw_translation_decomposition(packet, fraction, L=1.0, basis=None):
    """[(shift, weight)] with Psi(x, (p/q) T_R) = sum weight * Psi_ext(x - shift, 0).

    Psi_ext is the odd 2L-periodic extension of the initial state. Shifts
    come in +/- pairs 2Ls/l sharing the weight a_s; s = 0 appears once and,
    for even l, the shift L appears once.
    """
    if basis is not None:
        if basis.kind != "ISW":
            raise NotISW(f"translation theorem needs the square well, got {basis.kind}")
        L = basis.params["L"]
    dec = revival_coefficients(fraction)
    l = dec.l
    out = []
    if dec.a[0] != 0:
        out.append((0.0, dec.a[0]))
    for s in range(1, (l - 1) // 2 + 1):
        if dec.a[s] != 0:
            d = 2 * L * s / l
            out.append((d, dec.a[s]))
            out.append((-d, dec.a[s]))
    if l % 2 == 0 and dec.a[l // 2] != 0:
        out.append((L, dec.a[l // 2]))
    return out


def odd_extension(basis, packet, y):
    """Psi(y, 0) continued as an odd 2L-periodic function, by folding."""
    L = basis.params["L"]
    y = np.asarray(y, dtype=float)
    r = np.mod(y, 2 * L)
    upper = r > L
    folded = np.where(upper, 2 * L - r, r)
    vals = psi_direct(basis, packet, folded, 0.0, absolute_phase=True)
    return np.where(upper, -vals, vals)


def isw_translation_synthesis(basis, packet, fraction, x):
    parts = isw_translation_decomposition(packet, fraction, basis=basis)
    x = np.asarray(x, dtype=float)
    total = np.zeros(x.shape, dtype=complex)
    for shift, w in parts:
        total += w * odd_extension(basis, packet, x - shift)
    return total


def revival_time(basis, packet, fraction):
    f = _frac(fraction)
    return f.p / f.q * timescales(basis, packet.nbar).T_R


# -- residual of the Psi_cl evolution equation ----------------------------

def psi_cl_residual(basis, packet, x, t, correction=True, h=None, dt=None):
    """|i d_t Psi_cl + kin d_x^2 Psi_cl - V Psi_cl + sum_k c_k (E_k - E k) psi_k e^{-iEkt}|.

    E = 2 pi / T_cl and E_k is the eigenvalue of mode n = nbar + k. The
    correction term is dropped when ``correction`` is False.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    T1 = _tcl(basis, packet)
    Erate = 2 * math.pi / T1
    Ek = np.array([basis.energy(int(n)) for n in packet.n])
    kmax = math.sqrt(max(np.max(np.abs(Ek)), 1e-300) / basis.kin)
    if h is None:
        h = 0.005 / kmax
    if dt is None:
        dt = 0.005 / max(abs(Erate) * np.max(np.abs(packet.k)), abs(Erate))
    lo, hi = basis.support(packet.n.tolist())
    if basis.kind == "ISW":
        lo, hi = basis.domain
    if np.any(x - 2 * h <= lo) or np.any(x + 2 * h >= hi):
        raise BoundaryTooClose("x within two stencil cells of the boundary")
    rates = Erate * packet.k

    def field(xx, tt):
        table = ModeTable(basis, packet, np.atleast_1d(xx), energies=Ek)
        return table.row(tt, rates=rates)

    psi = field(x, t)
    dpsi_t = numerics.d1(lambda s: field(x, s), t, dt)
    lap = numerics.d2(lambda y: field(y, t), x, h)
    res = 1j * dpsi_t + basis.kin * lap - basis.V(x) * psi
    if correction:
        table = ModeTable(basis, packet, x, energies=Ek)
        w = packet.c * (Ek - Erate * packet.k) * np.exp(-1j * rates * t)
        corr = np.zeros(x.shape, dtype=complex)
        for j in range(packet.n.size):
            corr += w[j] * table.phi[j]
        res = res + corr
    return np.abs(res)


def residual_scale(basis, packet, x, t):
    """max_k |E_k| times max |Psi_cl| on x: the natural size of each term."""
    Ek = np.array([basis.energy(int(n)) for n in packet.n])
    return float(np.max(np.abs(Ek)) * np.max(np.abs(psi_cl(basis, packet, x, t))))


# -- Farey sequences -------------------------------------------------------

def mediant(a, b):
    a, b = _frac(a), _frac(b)
    p, q = a.p + b.p, a.q + b.q
    out = Fraction(p, q)
    if abs(a.p * b.q - b.p * a.q) == 1:
        assert out.p == p and out.q == q, "mediant of Farey neighbours must be reduced"
    return out


def _mediant_round(seq, limit=None):
    out = [seq[0]]
    for a, b in zip(seq, seq[1:]):
        if limit is None or a.q + b.q <= limit:
            out.append(mediant(a, b))
        out.append(b)
    return out


def farey_sequence(n):
    """All reduced p/q in [0, 1] with q <= n, ascending, by mediant insertion."""
    if n < 1:
        raise BadParams("Farey order must be >= 1")
    seq = [Fraction(0, 1), Fraction(1, 1)]
    while True:
        nxt = _mediant_round(seq, n)
        if len(nxt) == len(seq):
            return seq
        seq = nxt


def farey_listing(n):
    """Lists built by whole rounds of neighbour mediants starting from 0/1, 1/1.

    A round is applied only when every new denominator stays <= n. For
    n = 3, 5, 8 these are the 5-, 9- and 17-term lists that the familiar
    tabulation calls F_3, F_5 and F_8.
    """
    if n < 1:
        raise BadParams("Farey order must be >= 1")
    seq = [Fraction(0, 1), Fraction(1, 1)]
    while True:
        top = max(a.q + b.q for a, b in zip(seq, seq[1:]))
        if top > n:
            return seq
        seq = _mediant_round(seq)


def totient(k):
    result, m, d = k, k, 2
    while d * d <= m:
        if m % d == 0:
            while m % d == 0:
                m //= d
            result -= result // d
        d += 1
    if m > 1:
        result -= result // m
    return result
