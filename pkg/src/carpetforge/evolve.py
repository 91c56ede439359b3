"""Direct eigenfunction-sum propagation: the reference for every closed form.

Psi(x, t) = sum_n c_n psi_n(x) exp(-i (E_n - E_ref) t). The reference energy
E_ref is E_nbar unless ``absolute_phase`` is set, in which case it is 0.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import OutOfDomain, QuadratureFail
from .wavepacket import timescales


def thread_count():
    try:
        n = int(os.environ.get("CARPETFORGE_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


@dataclass
class DensityGrid:
    x: np.ndarray
    t: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)
    mask: np.ndarray = None

    @property
    def shape(self):
        return self.values.shape

    @property
    def x_axis(self):
        return (float(self.x[0]), float(self.x[-1]), self.x.size)

    @property
    def t_axis(self):
        return (float(self.t[0]), float(self.t[-1]), self.t.size)


def axis(spec):
    """(lo, hi, n) -> array; arrays pass through."""
    if isinstance(spec, np.ndarray):
        return spec.astype(float)
    if isinstance(spec, (tuple, list)) and len(spec) == 3 and float(spec[2]).is_integer():
        lo, hi, n = spec
        n = int(n)
        if n == 1:
            return np.array([float(lo)])
        return np.linspace(float(lo), float(hi), n)
    return np.asarray(spec, dtype=float)


class ModeTable:
    """Packet modes with their energies and eigenfunction samples on x."""

    def __init__(self, basis, packet, x, energies=None):
        self.basis = basis
        self.packet = packet
        self.x = np.asarray(x, dtype=float)
        self.n = packet.n
        self.c = packet.c
        self.E = np.array([basis.energy(int(n)) for n in self.n]) if energies is None \
            else np.asarray(energies, dtype=float)
        self.phi = np.array([basis.eigenfunction(int(n))(self.x) for n in self.n])

    def row(self, t, e_ref=0.0, rates=None):
        """Complex Psi on x at one time by an ordered mode loop."""
        w = self.c * np.exp(-1j * ((self.E - e_ref) if rates is None else rates) * t)
        re = np.zeros(self.x.shape)
        im = np.zeros(self.x.shape)
        for j in range(self.n.size):
            re += w[j].real * self.phi[j]
            im += w[j].imag * self.phi[j]
        return re + 1j * im


def _ref_energy(basis, packet, absolute_phase):
    return 0.0 if absolute_phase else float(basis.energy(packet.nbar))


def psi_direct(basis, packet, x, t, absolute_phase=False):
    """Psi at points x and a single time t (or times t, giving shape (nt, nx))."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xs = np.atleast_1d(x)
    table = ModeTable(basis, packet, xs)
    e_ref = _ref_energy(basis, packet, absolute_phase)
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    rows = np.array([table.row(tt, e_ref) for tt in ts])
    if np.ndim(t) == 0:
        rows = rows[0]
        return rows[0] if scalar else rows
    return rows


def _check_domain(basis, x):
    a, b = basis.domain
    if x.min() < a or x.max() > b:
        raise OutOfDomain(f"x range [{x.min()}, {x.max()}] exceeds domain ({a}, {b})")


def density_grid(basis, packet, x_axis, t_axis, absolute_phase=False, threads=None):
    x = axis(x_axis)
    t = axis(t_axis)
    _check_domain(basis, x)
    table = ModeTable(basis, packet, x)
    e_ref = _ref_energy(basis, packet, absolute_phase)

    def one(tt):
        r = table.row(tt, e_ref)
        return r.real * r.real + r.imag * r.imag

    workers = threads or thread_count()
    if workers > 1 and t.size > 1:
        with ThreadPoolExecutor(workers) as ex:
            rows = list(ex.map(one, t))
    else:
        rows = [one(tt) for tt in t]
    meta = {"basis": basis.ident, "packet": packet.ident, "engine": "direct",
            "terms": int(t.size * x.size * packet.n.size ** 2)}
    return DensityGrid(x, t, np.array(rows), meta)


def density_point(basis, packet, x, t, absolute_phase=False):
    r = psi_direct(basis, packet, x, t, absolute_phase)
    return r.real * r.real + r.imag * r.imag


@dataclass(frozen=True)
class Observables:
    norm: float
    mean_x: float
    mean_p: float
    ehrenfest_residual: float
    force: float


def observables(basis, packet, t, nx=4096, dt=None):
    """Norm, <x>, <p>, and |d<p>/dt - <-V'>| at time t."""
    lo, hi = basis.support(packet.n.tolist())
    x = np.linspace(lo, hi, nx + 1)
    h = x[1] - x[0]
    table = ModeTable(basis, packet, x)
    e_ref = float(basis.energy(packet.nbar))
    if dt is None:
        T = timescales(basis, packet.nbar).T_cl if len(packet) > 1 else 1.0
        dt = 1e-4 * abs(T) if math.isfinite(T) else 1e-4

    def mean_p(tt):
        psi = table.row(tt, e_ref)
        dpsi = numerics.grid_d1(psi, h)
        return float(np.real(numerics.simpson(np.conj(psi) * (-1j) * dpsi, h))), psi

    p0, psi = mean_p(t)
    rho = np.abs(psi) ** 2
    norm = float(numerics.simpson(rho, h))
    if not np.isfinite(norm):
        raise QuadratureFail("non-finite norm")
    mean_x = float(numerics.simpson(x * rho, h))
    dv = basis.dV(x)
    force = float(-numerics.simpson(np.where(rho > 0, dv, 0.0) * rho, h))
    pp, _ = mean_p(t + dt)
    pm, _ = mean_p(t - dt)
    dpdt = (pp - pm) / (2 * dt)
    return Observables(norm, mean_x, p0, abs(dpdt - force), force)
