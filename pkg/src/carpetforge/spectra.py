"""Exactly solvable potentials: spectra, normalized eigenfunctions and WKB.

Units are hbar = 2m = 1, so H = -d^2/dx^2 + V for every potential except
the harmonic oscillator, which keeps its textbook form
E_n = (n + 1/2) omega with V = omega^2 x^2 / 2 and therefore H = -(1/2) d^2/dx^2 + V.
The attribute ``Eigenbasis.kin`` records that coefficient.

The seven shape-invariant potentials are written through their
superpotentials; eigenfunctions are a log-prefactor times a Jacobi or
Laguerre polynomial, normalized numerically.
"""

import math
import threading
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np
from scipy import integrate as sint
from scipy import optimize

from . import numerics
from .errors import (BadParams, ComplexLeak, ForbiddenRegion, NoBoundState,
                     NoConvergence, UnboundState, ConfigError)
from .polynomials import hermite_functions, jacobi, laguerre

KINDS = ("ISW", "SHO", "Morse", "Eckart", "PoschlTeller", "ScarfI",
         "ScarfII", "RosenMorseI", "RosenMorseII")

_ALIASES = {k.lower(): k for k in KINDS}
_ALIASES.update({"pt": "PoschlTeller", "poschl-teller": "PoschlTeller",
                 "rmi": "RosenMorseI", "rmii": "RosenMorseII",
                 "rm1": "RosenMorseI", "rm2": "RosenMorseII",
                 "scarf1": "ScarfI", "scarf2": "ScarfII", "mrs": "Morse",
                 "square": "ISW", "oscillator": "SHO"})

DEFAULT_PARAMS = {
    "ISW": {"L": 1.0},
    "SHO": {"omega": 1.0},
    "Morse": {"A": 16.0, "B": 16.0, "alpha": 1.0},
    "Eckart": {"A": 5.0, "B": 320.0, "alpha": 1.0},
    "PoschlTeller": {"A": 15.0, "B": 20.0, "alpha": 1.0},
    "ScarfI": {"A": 3.0, "B": 1.0, "alpha": 1.0},
    "ScarfII": {"A": 15.0, "B": 5.0, "alpha": 1.0},
    "RosenMorseI": {"A": 2.0, "B": 1.0, "alpha": 1.0},
    "RosenMorseII": {"A": 20.0, "B": 20.0, "alpha": 1.0},
}

# relative level below which an eigenfunction counts as decayed
DECAY = 1e-14
_SAMPLES = 8001
_LN2 = math.log(2.0)


def canonical_kind(kind):
    key = str(kind).strip().lower().replace("_", "")
    if key in _ALIASES:
        return _ALIASES[key]
    raise BadParams(f"unknown potential {kind!r}")


def _logcosh(u):
    u = np.abs(u)
    return u + np.log1p(np.exp(-2.0 * u)) - _LN2


def _logsinh(u):
    # u > 0
    return u + np.log(-np.expm1(-2.0 * u)) - _LN2


class Eigenfunction:
    """Normalized eigenfunction evaluator for one state.

    Calling it returns real values; outside the detected support the result
    is 0 and ``clamped`` counts how many samples were cut off that way.
    """

    def __init__(self, basis, n, energy, raw, support, log_scale, phase):
        self.basis = basis
        self.n = n
        self.energy = energy
        self._raw = raw
        self.support = support
        self._log_scale = log_scale
        self._phase = phase
        self._lock = threading.Lock()
        self.clamped = 0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.zeros(x.shape)
        lo, hi = self.support
        inside = (x >= lo) & (x <= hi)
        outside = int(np.count_nonzero(~inside & self.basis.in_domain(x)))
        if outside:
            with self._lock:
                self.clamped += outside
        if np.any(inside):
            out[inside] = _eval_raw(self._raw, x[inside], self._log_scale,
                                    self._phase).real
        return out[0] if scalar else out


def _eval_raw(raw, x, log_scale, phase):
    logm, shape_fn = raw(x)
    rel = logm - log_scale
    ok = np.isfinite(rel) & (rel > -740.0)
    val = np.zeros(x.shape, dtype=complex)
    if np.any(ok):
        val[ok] = np.exp(rel[ok]) * shape_fn(ok) * phase
    return val


@dataclass(frozen=True)
class WkbState:
    n: int
    energy: float
    turning_points: tuple
    action: float
    maslov: float
    basis: object

    def momentum(self, x):
        return wkb_momentum(self.basis, self.energy, x)


class Eigenbasis:
    """A named potential with its exact spectrum and eigenfunctions.

    Immutable after construction; eigenfunctions are built lazily and cached.
    """

    def __init__(self, kind, params=None, **overrides):
        kind = canonical_kind(kind)
        p = dict(DEFAULT_PARAMS[kind])
        if params:
            p.update(params)
        p.update(overrides)
        p = {k: float(v) for k, v in p.items()}
        self.kind = kind
        self.params = MappingProxyType(p)
        self.kin = 0.5 if kind == "SHO" else 1.0
        self._check_params()
        self._setup()
        self._cache = {}
        self._lock = threading.Lock()

    # -- construction -------------------------------------------------
    def _check_params(self):
        p = self.params
        for key in ("L", "omega", "A", "alpha"):
            if key in p and not p[key] > 0:
                raise BadParams(f"{self.kind}: {key} must be positive")
        if "B" in p and not p["B"] > 0:
            raise BadParams(f"{self.kind}: B must be positive")
        k = self.kind
        if k == "Eckart" and not p["A"] > p["alpha"]:
            raise BadParams("Eckart needs A > alpha for a repulsive core")
        if k == "PoschlTeller" and not p["B"] > p["A"]:
            raise BadParams("Poschl-Teller needs B > A")
        if k == "ScarfI" and not p["A"] > p["B"]:
            raise BadParams("Scarf I needs A > B")
        if k == "RosenMorseI" and not p["A"] > p["alpha"]:
            raise BadParams("Rosen-Morse I needs A > alpha")

    def _setup(self):
        p = self.params
        k = self.kind
        inf = math.inf
        self.n_min = 1 if k == "ISW" else 0
        self.poly = None
        if k == "ISW":
            L = p["L"]
            self.domain = (0.0, L)
            self.poly = (0.0, 0.0, math.pi ** 2 / L ** 2)
            self.n_max = None
        elif k == "SHO":
            self.domain = (-inf, inf)
            self.poly = (0.5 * p["omega"], p["omega"])
            self.n_max = None
        else:
            A, B, al = p["A"], p["B"], p["alpha"]
            s = A / al
            self.s = s
            if k == "Morse":
                self.domain = (-inf, inf)
                self.poly = (0.0, 2 * A * al, -al * al)
                self.n_max = math.ceil(s) - 1
            elif k == "Eckart":
                lam = B / al ** 2
                self.lam = lam
                self.domain = (0.0, inf)
                self.n_max = math.ceil(math.sqrt(lam) - s) - 1
            elif k == "PoschlTeller":
                self.lam = B / al
                self.domain = (0.0, inf)
                self.poly = (0.0, 2 * A * al, -al * al)
                self.n_max = math.ceil(s) - 1
            elif k == "ScarfI":
                self.lam = B / al
                h = math.pi / (2 * al)
                self.domain = (-h, h)
                self.poly = (0.0, 2 * A * al, al * al)
                self.n_max = None
            elif k == "ScarfII":
                self.lam = B / al
                self.domain = (-inf, inf)
                self.poly = (0.0, 2 * A * al, -al * al)
                self.n_max = math.ceil(s) - 1
            elif k == "RosenMorseI":
                self.lam = B / al ** 2
                self.domain = (0.0, math.pi / al)
                self.n_max = None
            elif k == "RosenMorseII":
                lam = B / al ** 2
                self.lam = lam
                self.domain = (-inf, inf)
                self.n_max = math.ceil(s - math.sqrt(lam)) - 1
            if self.n_max is not None and self.n_max < 0:
                raise BadParams(f"{k}: parameters admit no bound state")

    # -- identification ----------------------------------------------
    @property
    def ident(self):
        args = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.kind}({args})"

    def __repr__(self):
        return f"Eigenbasis({self.ident})"

    @property
    def is_polynomial(self):
        return self.poly is not None

    @property
    def is_quadratic(self):
        return self.poly is not None and len(self.poly) == 3 and self.poly[2] != 0

    def in_domain(self, x):
        a, b = self.domain
        return (np.asarray(x) >= a) & (np.asarray(x) <= b)

    def check_n(self, n):
        if int(n) != n:
            raise UnboundState(f"quantum number {n} is not an integer")
        n = int(n)
        if n < self.n_min or (self.n_max is not None and n > self.n_max):
            top = "inf" if self.n_max is None else self.n_max
            raise UnboundState(f"{self.kind}: n={n} outside bound range [{self.n_min}, {top}]")
        return n

    # -- spectrum -----------------------------------------------------
    def energy(self, n):
        """Exact eigenvalue; accepts real (non-integer) n for continuation."""
        n = np.asarray(n, dtype=float)
        if self.poly is not None:
            out = np.zeros_like(n)
            for c in reversed(self.poly):
                out = out * n + c
            return out if out.ndim else float(out)
        p = self.params
        A, B, al = p["A"], p["B"], p["alpha"]
        if self.kind == "Eckart":
            u = A + n * al
            out = A * A - u * u - B * B / (u * u) + B * B / (A * A)
        elif self.kind == "RosenMorseI":
            u = A + n * al
            out = u * u - A * A - B * B / (u * u) + B * B / (A * A)
        else:  # RosenMorseII
            u = A - n * al
            out = A * A - u * u + B * B / (A * A) - B * B / (u * u)
        return out if np.ndim(out) else float(out)

    def energy_derivative(self, n, j):
        """Exact j-th derivative of E(n) for polynomial spectra, else None."""
        if self.poly is None:
            return None
        c = np.polynomial.polynomial.polyder(np.array(self.poly, dtype=float), j)
        return float(np.polynomial.polynomial.polyval(float(n), c)) if c.size else 0.0

    # -- potential ----------------------------------------------------
    def V(self, x):
        x = np.asarray(x)
        p = self.params
        k = self.kind
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            if k == "ISW":
                xr = np.real(x)
                out = np.where((xr >= 0) & (xr <= p["L"]), 0.0 * x, np.inf)
                return out
            if k == "SHO":
                return 0.5 * p["omega"] ** 2 * x * x
            A, B, al = p["A"], p["B"], p["alpha"]
            z = al * x
            if k == "Morse":
                e = np.exp(-z)
                return A * A + B * B * e * e - 2 * B * (A + al / 2) * e
            if k == "Eckart":
                return (A * A + B * B / (A * A) - 2 * B / np.tanh(z)
                        + A * (A - al) / np.sinh(z) ** 2)
            if k == "PoschlTeller":
                sh = np.sinh(z)
                return (A * A + (A * A + B * B + A * al) / sh ** 2
                        - B * (2 * A + al) * np.cosh(z) / sh ** 2)
            if k == "ScarfI":
                c = np.cos(z)
                return (-A * A + (A * A + B * B - A * al) / c ** 2
                        - B * (2 * A - al) * np.sin(z) / c ** 2)
            if k == "ScarfII":
                ch = np.cosh(z)
                return (A * A + (B * B - A * A - A * al) / ch ** 2
                        + B * (2 * A + al) * np.tanh(z) / ch)
            if k == "RosenMorseI":
                return (A * (A - al) / np.sin(z) ** 2 + 2 * B / np.tan(z)
                        - A * A + B * B / (A * A))
            # RosenMorseII
            return (A * A + B * B / (A * A) + 2 * B * np.tanh(z)
                    - A * (A + al) / np.cosh(z) ** 2)

    def dV(self, x):
        if self.kind == "ISW":
            return np.zeros_like(np.asarray(x, dtype=float))
        return numerics.complex_step(self.V, x)

    def potential_minimum(self):
        """(x_min, V_min) of the well, analytic where simple."""
        if self.kind == "ISW":
            return 0.5 * self.params["L"], 0.0
        if self.kind == "SHO":
            return 0.0, 0.0
        if self.kind == "Morse":
            p = self.params
            xm = math.log(p["B"] / (p["A"] + p["alpha"] / 2)) / p["alpha"]
            return xm, float(self.V(xm))
        lo, hi = self._search_box(0)
        x = np.linspace(lo, hi, 20001)[1:-1]
        v = self.V(x)
        i = int(np.nanargmin(v))
        a, b = x[max(i - 1, 0)], x[min(i + 1, x.size - 1)]
        res = optimize.minimize_scalar(lambda t: float(self.V(t)), bounds=(a, b),
                                       method="bounded",
                                       options={"xatol": 1e-13 * max(1.0, abs(x[i]))})
        return float(res.x), float(res.fun)

    # -- eigenfunctions -----------------------------------------------
    def _search_box(self, n):
        p = self.params
        k = self.kind
        a, b = self.domain
        if k == "SHO":
            w = math.sqrt(2 * n + 1) + 12.0
            return -w / math.sqrt(p["omega"]), w / math.sqrt(p["omega"])
        al = p.get("alpha", 1.0)
        if k == "Morse":
            xm = math.log(p["B"] / (p["A"] + al / 2)) / al
            return xm - 4.0 / al, xm + 40.0 / al
        if k in ("Eckart", "PoschlTeller"):
            return 0.0, 40.0 / al
        if k in ("ScarfII", "RosenMorseII"):
            return -40.0 / al, 40.0 / al
        return a, b

    def _raw(self, n):
        """Return raw(x) -> (log_magnitude, shape_fn(mask)) for state n."""
        p = self.params
        k = self.kind
        if k == "SHO":
            w = p["omega"]

            def raw(x):
                h = hermite_functions(n, math.sqrt(w) * x)[n] * w ** 0.25
                logm = np.zeros(x.shape)
                return logm, lambda m: h[m]
            return raw
        A, B, al = p["A"], p["B"], p["alpha"]
        s = A / al
        if k == "Morse":
            c = math.log(2 * B / al)

            def raw(x):
                logy = c - al * x
                with np.errstate(over="ignore"):
                    y = np.exp(logy)
                logm = (s - n) * logy - 0.5 * y
                return logm, lambda m: laguerre(n, 2 * s - 2 * n, y[m])
            return raw
        if k == "Eckart":
            lam = self.lam
            a = lam / (n + s)
            s3, s4 = a - n - s, -(s + n + a)

            def raw(x):
                with np.errstate(divide="ignore", invalid="ignore"):
                    z = al * x
                    lem = np.log(np.expm1(2 * z))
                    lym = _LN2 - lem
                    lyp = _LN2 + 2 * z - lem
                    logm = 0.5 * s3 * lym + 0.5 * s4 * lyp
                logm = np.where(x > 0, logm, -np.inf)
                return logm, lambda m: jacobi(n, s3, s4, 1.0 / np.tanh(al * x[m]))
            return raw
        if k == "PoschlTeller":
            lam = self.lam

            def raw(x):
                with np.errstate(divide="ignore", invalid="ignore"):
                    u = 0.5 * al * x
                    lym = _LN2 + 2 * _logsinh(u)
                    lyp = _LN2 + 2 * _logcosh(u)
                    logm = 0.5 * (lam - s) * lym - 0.5 * (lam + s) * lyp
                logm = np.where(x > 0, logm, -np.inf)
                return logm, lambda m: jacobi(n, lam - s - 0.5, -lam - s - 0.5,
                                              np.cosh(al * x[m]))
            return raw
        if k == "ScarfI":
            lam = self.lam

            def raw(x):
                y = np.sin(al * x)
                with np.errstate(divide="ignore", invalid="ignore"):
                    logm = (0.5 * (s - lam) * np.log1p(-y)
                            + 0.5 * (s + lam) * np.log1p(y))
                inside = np.abs(al * x) < 0.5 * math.pi
                logm = np.where(inside, logm, -np.inf)
                return logm, lambda m: jacobi(n, s - lam - 0.5, s + lam - 0.5, y[m])
            return raw
        if k == "ScarfII":
            lam = self.lam

            def raw(x):
                z = al * x
                y = np.sinh(z)
                logm = -s * _logcosh(z) - lam * np.arctan(y)
                return logm, lambda m: (1j ** n) * jacobi(
                    n, -1j * lam - s - 0.5, 1j * lam - s - 0.5, 1j * y[m])
            return raw
        if k == "RosenMorseI":
            lam = self.lam
            a = lam / (s + n)

            def raw(x):
                z = al * x
                with np.errstate(divide="ignore", invalid="ignore"):
                    logm = (s + n) * np.log(np.sin(z)) + a * z
                inside = (z > 0) & (z < math.pi)
                logm = np.where(inside, logm, -np.inf)
                return logm, lambda m: jacobi(n, -s - n - 1j * a, -s - n + 1j * a,
                                              1j / np.tan(z[m]))
            return raw
        # RosenMorseII
        lam = self.lam
        a = lam / (s - n)
        s1, s2 = s - n + a, s - n - a

        def raw(x):
            z = al * x
            l1m = _LN2 - np.logaddexp(0.0, 2 * z)
            l1p = _LN2 - np.logaddexp(0.0, -2 * z)
            logm = 0.5 * s1 * l1m + 0.5 * s2 * l1p
            return logm, lambda m: jacobi(n, s1, s2, np.tanh(z[m]))
        return raw

    def _build(self, n):
        E = float(self.energy(n))
        if self.kind == "ISW":
            L = self.params["L"]
            c = math.sqrt(2.0 / L)

            def raw(x):
                inside = (x >= 0) & (x <= L)
                return np.where(inside, 0.0, -np.inf), lambda m: c * np.sin(n * math.pi * x[m] / L)
            return Eigenfunction(self, n, E, raw, (0.0, L), 0.0, 1.0)
        raw = self._raw(n)
        lo, hi = self._search_box(n)
        a, b = self.domain
        for _ in range(40):
            x = np.linspace(lo, hi, _SAMPLES)
            logm, shape_fn = raw(x)
            ok = np.isfinite(logm)
            la = np.full(x.shape, -np.inf)
            vals = np.zeros(x.shape, dtype=complex)
            vals[ok] = shape_fn(ok)
            with np.errstate(divide="ignore"):
                la[ok] = logm[ok] + np.log(np.abs(vals[ok]))
            top = np.max(la)
            keep = np.nonzero(la >= top + math.log(DECAY))[0]
            i0, i1 = keep[0], keep[-1]
            grow_lo = i0 == 0 and math.isinf(a)
            grow_hi = i1 == x.size - 1 and math.isinf(b)
            if not (grow_lo or grow_hi):
                break
            w = hi - lo
            if grow_lo:
                lo -= w
            if grow_hi:
                hi += w
        else:
            raise NoConvergence(f"{self.kind} n={n}: support keeps growing")
        step = x[1] - x[0]
        lo_s = max(a, x[i0] - step)
        hi_s = min(b, x[i1] + step)
        # global phase from the largest sample
        j = int(np.argmax(la))
        ph = vals[j] / abs(vals[j])
        phase = np.conj(ph)
        sample = np.zeros(x.shape, dtype=complex)
        sok = ok & (la > top - 740)
        sample[sok] = np.exp(logm[sok] - top) * vals[sok] * phase
        peak = np.max(np.abs(sample))
        leak = np.max(np.abs(sample.imag)) / peak
        if leak > 1e-8:
            raise ComplexLeak(f"{self.kind} n={n}: imaginary residue {leak:.3g}")

        def dens(t):
            return np.abs(_eval_raw(raw, t, top, phase)) ** 2
        norm = numerics.integrate(dens, lo_s, hi_s)
        log_scale = top + 0.5 * math.log(norm)
        return Eigenfunction(self, n, E, raw, (lo_s, hi_s), log_scale, phase)

    def eigenfunction(self, n):
        n = self.check_n(n)
        with self._lock:
            ef = self._cache.get(n)
        if ef is None:
            ef = self._build(n)
            with self._lock:
                ef = self._cache.setdefault(n, ef)
        return ef

    def eigen_system(self, n):
        ef = self.eigenfunction(n)
        return ef.energy, ef

    def support(self, ns):
        """Smallest interval holding the supports of all states in ``ns``."""
        sup = [self.eigenfunction(n).support for n in ns]
        return min(s[0] for s in sup), max(s[1] for s in sup)


def eigen_system(kind, params, n):
    basis = kind if isinstance(kind, Eigenbasis) else Eigenbasis(kind, params)
    return basis.eigen_system(n)


# -- WKB --------------------------------------------------------------

def wkb_momentum(basis, E, x):
    """Local wave number sqrt((E - V(x))/kin), or ForbiddenRegion."""
    x = np.asarray(x, dtype=float)
    d = E - basis.V(x)
    if np.any(~(d > 0)):
        raise ForbiddenRegion(f"E={E} not above V on the requested points")
    out = np.sqrt(d / basis.kin)
    return float(out) if out.ndim == 0 else out


def default_maslov(basis):
    """0 for hard walls, 1/2 for two smooth turning points."""
    return 0.0 if basis.kind == "ISW" else 0.5


def turning_points(basis, E):
    if basis.kind == "ISW":
        if E <= 0:
            raise ForbiddenRegion("energy below the well floor")
        return 0.0, basis.params["L"]
    xm, vm = basis.potential_minimum()
    if E <= vm:
        raise ForbiddenRegion("energy below the potential minimum")
    a, b = basis.domain
    f = lambda t: float(basis.V(t)) - E  # noqa: E731

    def outward(edge, sign):
        if math.isinf(edge):
            step = 1.0 / basis.params.get("alpha", 1.0)
            for _ in range(200):
                t = xm + sign * step
                with np.errstate(over="ignore"):
                    if f(t) > 0:
                        return t
                step *= 2.0
                if step > 1e6:
                    break
            raise NoBoundState(f"{basis.kind}: E={E} is not confined")
        for k in range(1, 200):
            t = edge - (edge - xm) * 2.0 ** (-k)
            if f(t) > 0:
                return t
        raise NoBoundState(f"{basis.kind}: E={E} is not confined")

    tl = outward(a, -1.0)
    tr = outward(b, 1.0)
    x_l = optimize.brentq(f, tl, xm, xtol=1e-15, rtol=1e-15, maxiter=500)
    x_r = optimize.brentq(f, xm, tr, xtol=1e-15, rtol=1e-15, maxiter=500)
    return x_l, x_r


def action(basis, E):
    """Integral of p = sqrt((E - V)/kin) between the turning points."""
    x_l, x_r = turning_points(basis, E)
    if basis.kind == "ISW":
        return (x_r - x_l) * math.sqrt(E / basis.kin), (x_l, x_r)
    c = 0.5 * (x_l + x_r)
    h = 0.5 * (x_r - x_l)

    def g(u):
        x = c - h * math.cos(u)
        d = (E - float(basis.V(x))) / basis.kin
        return math.sqrt(d) * h * math.sin(u) if d > 0 else 0.0
    val, _ = sint.quad(g, 0.0, math.pi, epsabs=1e-13, epsrel=1e-13, limit=400)
    return val, (x_l, x_r)


def bohr_sommerfeld_solve(basis, n, maslov=None, tol=1e-10, max_iter=200):
    """Solve the quantization condition for quantum number ``n``.

    The condition is  integral p dx = (n + maslov) pi. ``maslov`` defaults to
    0 for the square well and 1/2 for smooth wells; pass 0 to get the bare
    n pi rule everywhere.
    """
    if n < 1 and (maslov == 0 or (maslov is None and basis.kind == "ISW")):
        raise ConfigError("n must be >= 1 for the n pi rule")
    mu = default_maslov(basis) if maslov is None else float(maslov)
    target = (n + mu) * math.pi
    if basis.kind == "ISW":
        L = basis.params["L"]
        E = (target / L) ** 2
        return WkbState(n, E, (0.0, L), target, mu, basis)
    xm, vm = basis.potential_minimum()
    scale = max(1.0, abs(vm))
    e_lo = vm + 1e-12 * scale
    e_hi = vm + scale
    ceiling = math.inf
    for _ in range(200):
        try:
            I, _ = action(basis, e_hi)
        except NoBoundState:
            ceiling = e_hi
            e_hi = 0.5 * (e_lo + e_hi)
            if ceiling - e_lo < 1e-12 * scale:
                raise NoBoundState(f"{basis.kind}: action saturates below {target}")
            continue
        if I >= target:
            break
        e_lo = e_hi
        e_hi = e_hi + 2 * (e_hi - vm) if math.isinf(ceiling) else 0.5 * (e_hi + ceiling)
        if not math.isinf(ceiling) and ceiling - e_hi < 1e-12 * scale:
            raise NoBoundState(f"{basis.kind}: action saturates below {target}")
    else:
        raise NoConvergence("could not bracket the quantization condition")
    F = lambda e: action(basis, e)[0] - target  # noqa: E731
    E = optimize.brentq(F, e_lo, e_hi, xtol=1e-14 * scale, rtol=1e-15, maxiter=max_iter)
    I, tp = action(basis, E)
    if abs(I - target) > tol * max(1.0, target):
        raise NoConvergence(f"action residual {I - target:.3g}")
    return WkbState(n, E, tp, I, mu, basis)
