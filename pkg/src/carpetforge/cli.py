"""Command-line front end.

    carpetforge <command> [--preset NAME] [--config FILE] [--key value ...] [--out DIR]

Settings are merged preset < config file < flags. Config files hold flat
``key = value`` lines (``#`` starts a comment); dashes in keys become
underscores and ``packet.``/``grid.`` prefixes are dropped. Potential
parameters go in as ``basis.<name>``, e.g. ``basis.A = 10``.
"""

import json
import math
import os
import sys
import time

import numpy as np

from . import beats, carpet_closed, revivals, traces
from .errors import BadParams, CarpetError, ConfigError, RegimeError
from .evolve import DensityGrid, density_grid
from .presets import PRESETS
from .render import IoError, write_csv, write_pgm
from .revivals import Fraction
from .spectra import Eigenbasis, turning_points
from .wavepacket import make_coefficients, timescales

COMMANDS = ("carpet", "psicl", "beats", "revival", "traces", "dephase", "farey")
GRID_COMMANDS = ("carpet", "psicl", "beats", "traces")
USAGE = ("usage: carpetforge <command> [--preset NAME] [--config FILE] "
         "[--key value ...] [--out DIR]\ncommands: " + ", ".join(COMMANDS))


# -- configuration ----------------------------------------------------------

def _norm_key(key):
    key = key.strip().replace("-", "_")
    for pre in ("packet.", "grid."):
        if key.startswith(pre):
            sub = key[len(pre):]
            return {"kind": "packet", "sigma": "sigma_n"}.get(sub, sub)
    if key == "basis.kind":
        return "kind"
    return key


def read_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    out = {}
    for i, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{i}: expected key = value")
        k, v = line.split("=", 1)
        out[_norm_key(k)] = v.strip()
    return out


def parse_args(argv):
    if not argv or argv[0] in ("-h", "--help"):
        raise ConfigError(USAGE)
    command = argv[0]
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}\n{USAGE}")
    flags = {}
    rest = list(argv[1:])
    while rest:
        tok = rest.pop(0)
        if not tok.startswith("--") or len(tok) == 2:
            raise ConfigError(f"unexpected argument {tok!r}")
        if "=" in tok:
            k, v = tok[2:].split("=", 1)
        else:
            if not rest:
                raise ConfigError(f"flag {tok} needs a value")
            k, v = tok[2:], rest.pop(0)
        flags[_norm_key(k)] = v
    return command, flags


def build_settings(command, flags):
    cfg = {}
    name = flags.pop("preset", None)
    if name is not None:
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}")
        cfg.update(PRESETS[name])
        if cfg.pop("command") != command:
            raise ConfigError(f"preset {name} belongs to '{PRESETS[name]['command']}'")
    path = flags.pop("config", None)
    if path is not None:
        cfg.update(read_config(path))
    cfg.update(flags)
    cfg.pop("command", None)
    cfg["name"] = cfg.get("name", name or command)
    return cfg


class Settings:
    """Typed access to the merged string config; records what was read."""

    def __init__(self, raw):
        self.raw = dict(raw)
        self.used = {}

    def has(self, key):
        return key in self.raw

    def _get(self, key, default, conv):
        if key not in self.raw:
            if default is _REQUIRED:
                raise ConfigError(f"missing setting {key!r}")
            self.used[key] = default
            return default
        text = self.raw[key]
        try:
            val = conv(text)
        except (ValueError, ZeroDivisionError, BadParams) as exc:
            raise ConfigError(f"bad value for {key}: {text!r}") from exc
        self.used[key] = val
        return val

    def str(self, key, default=None):
        return self._get(key, default, str)

    def int(self, key, default=None):
        return self._get(key, default, int)

    def float(self, key, default=None):
        return self._get(key, default, _number)

    def basis_params(self):
        out = {}
        for k, v in self.raw.items():
            if k.startswith("basis."):
                out[k[6:]] = self._get(k, None, _number)
        return out


_REQUIRED = object()


def _number(text):
    """Float, or a fraction like '1/8'."""
    text = str(text).strip()
    if "/" in text:
        a, b = text.split("/", 1)
        return float(a) / float(b)
    return float(text)


# -- building blocks ----------------------------------------------------------

def make_basis(s):
    try:
        return Eigenbasis(s.str("kind", "ISW"), s.basis_params())
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad potential settings: {exc}") from exc


def make_packet(s, basis):
    kind = s.str("packet", "gaussian").lower()
    nbar = s.int("nbar", 40)
    if kind == "gaussian":
        return make_coefficients("GaussianN", nbar, s.float("sigma_n", 2.0), basis=basis)
    if kind == "tophat":
        return make_coefficients("TopHat", nbar, s.int("half_width", 4), basis=basis)
    if kind == "spatial":
        return make_coefficients("SpatialGaussian", nbar, basis=basis, x0=s.float("x0", _REQUIRED),
                                 sigma_x=s.float("sigma_x", _REQUIRED), p0=s.float("p0", 0.0))
    if kind == "squares":
        lo, hi = s.int("n_lo", 1), s.int("n_hi", 81)
        return make_coefficients("PerfectSquares", nbar, window=(lo, hi), basis=basis)
    if kind in ("even", "uniform"):
        # equal weights on every level n_lo..n_hi
        lo, hi = s.int("n_lo", 1), s.int("n_hi", 10)
        ns = list(range(max(lo, basis.n_min), hi + 1))
        if not ns:
            raise ConfigError(f"no levels in [{lo}, {hi}]")
        return make_coefficients("Explicit", ns[len(ns) // 2], coeffs={n: 1.0 for n in ns},
                                 basis=basis)
    raise ConfigError(f"unknown packet kind {kind!r}")


def _x_range(s, basis, packet):
    lo_d, hi_d = basis.domain
    if s.has("x_min") and s.has("x_max"):
        return s.float("x_min"), s.float("x_max")
    if basis.kind == "ISW":
        return lo_d, hi_d
    top = int(np.max(packet.n))
    a, b = turning_points(basis, basis.energy(top))
    pad = 0.15 * (b - a)
    lo = max(a - pad, lo_d if math.isfinite(lo_d) else -math.inf)
    hi = min(b + pad, hi_d if math.isfinite(hi_d) else math.inf)
    return s.float("x_min", lo), s.float("x_max", hi)


def _time_unit(s, basis, packet):
    unit = s.str("t_unit", "T_cl")
    ts = timescales(basis, packet.nbar, order=2)
    if unit == "T_cl":
        return abs(ts.T_cl)
    if unit == "T_R":
        if math.isinf(ts.T_R):
            raise ConfigError("T_R is infinite for this spectrum; use t_unit = T_cl")
        return abs(ts.T_R)
    if unit == "abs":
        return 1.0
    raise ConfigError(f"t_unit must be T_cl, T_R or abs, not {unit!r}")


def _axis(s, key, lo, hi, default_n):
    n = s.int(key, default_n)
    if n < 2:
        raise ConfigError(f"{key} must be >= 2")
    return np.linspace(lo, hi, n)


def _grids(s, basis, packet):
    x0, x1 = _x_range(s, basis, packet)
    unit = _time_unit(s, basis, packet)
    x = _axis(s, "nx", x0, x1, 256)
    t = _axis(s, "nt", s.float("t_min", 0.0) * unit, s.float("t_max", 1.0) * unit, 256)
    return x, t, unit


# -- commands ---------------------------------------------------------------------

def cmd_carpet(s, out):
    basis = make_basis(s)
    packet = make_packet(s, basis)
    extra = {"basis": basis.ident, "packet": packet.ident, "nbar": packet.nbar}
    if s.has("cuts"):
        return _carpet_cuts(s, basis, packet, out, extra)
    method = s.str("method", "direct")
    if method not in ("direct", "closed", "both"):
        raise ConfigError("method must be direct, closed or both")
    x, t, unit = _grids(s, basis, packet)
    if method == "direct":
        return [("", density_grid(basis, packet, x, t))], extra
    if packet.kind != "GaussianN":
        raise ConfigError("the closed-form carpet needs a Gaussian packet")
    params = carpet_closed.CarpetClosedParams.from_basis(basis, packet.nbar, packet.info["sigma_n"])
    grid = carpet_closed.carpet_grid(params, x / params.L, t / params.T1)
    grids = [("", grid)]
    if method == "both":
        ref = density_grid(basis, packet, x, t)
        grids.append(("_direct", ref))
        m = grid.mask
        extra["closed_vs_direct_rel_l2_on_mask"] = beats.rel_l2(grid.values[m], ref.values[m])
    if s.str("overlay", "") == "dephase":
        extra["dephase"] = _dephase_overlay(s, params, x / params.L, out)
    return grids, extra


def _dephase_overlay(s, params, xi, out):
    A = s.float("A", 1.0)
    branch = s.str("branch", carpet_closed.LOWER)
    tau = np.full(xi.size, np.nan)
    for j, v in enumerate(xi):
        if not 0 < v <= 1:
            continue
        try:
            tau[j] = carpet_closed.dephase_curve(params, v, A, branch)
        except RegimeError:
            pass
    if out is not None:
        path = os.path.join(out, f"{s.raw['name']}_dephase.csv")
        rows = ["x,t"] + [f"{format(a * params.L, '.15g')},{format(b * params.T1, '.15g')}"
                          for a, b in zip(xi, tau) if np.isfinite(b)]
        _write_text(path, "\n".join(rows) + "\n")
    good = np.isfinite(tau)
    return {"A": A, "branch": branch, "points": int(good.sum()),
            "xi_min_valid": float(xi[good].min()) if good.any() else None}


def _carpet_cuts(s, basis, packet, out, extra):
    unit = _time_unit(s, basis, packet)
    x0, x1 = _x_range(s, basis, packet)
    x = _axis(s, "nx", x0, x1, 1001)
    grids = []
    for i, text in enumerate(s.str("cuts").split(",")):
        tt = _number(text) * unit
        g = density_grid(basis, packet, x, np.array([tt]))
        g.meta["cut"] = text.strip()
        grids.append((f"_cut{i}", g))
    extra["cuts"] = [g.meta["cut"] for _, g in grids]
    return grids, extra


def cmd_psicl(s, out):
    basis = make_basis(s)
    packet = make_packet(s, basis)
    x, t, unit = _grids(s, basis, packet)
    psi = revivals.psi_cl(basis, packet, x, t)
    vals = (psi * np.conj(psi)).real
    g = DensityGrid(x, t, vals, {"basis": basis.ident, "packet": packet.ident, "engine": "psi_cl"})
    return [("", g)], {"basis": basis.ident, "packet": packet.ident, "T_cl": unit}


def _beat_spec(s):
    return beats.BeatSpec(s.str("dist", "gaussian"), s.float("dn", 8.0), T1=1.0,
                          T2=s.float("t2_over_t1", 200.0), nbar=s.int("nbar", 40))


def cmd_beats(s, out):
    spec = _beat_spec(s)
    t = _axis(s, "nt", s.float("t_min", 0.0), s.float("t_max", 5.0), 2000)
    method = s.str("method", "closed")
    if method not in ("direct", "closed", "both"):
        raise ConfigError("method must be direct, closed or both")
    direct = beats.beat_signal_direct(spec, t) if method != "closed" else None
    if method == "direct":
        f = direct
    elif spec.distribution == beats.GAUSSIAN:
        f = beats.gaussian_beats_closed(spec, t)[0]
    else:
        f = beats.tophat_beats_closed(spec, t)
    extra = {"distribution": spec.distribution, "T2_over_T1": spec.ratio}
    if method == "both":
        extra["closed_vs_direct_rel_l2"] = beats.rel_l2(f, direct)
    g = DensityGrid(np.array([0.0]), t, np.abs(f)[:, None] ** 2, {"engine": f"beats_{method}"})
    return [("", g)], extra


def cmd_traces(s, out):
    basis = make_basis(s)
    packet = make_packet(s, basis)
    x, t, unit = _grids(s, basis, packet)
    mode = s.str("mode", traces.FULL)
    v_ref = s.float("v_ref", 0.0)
    if mode not in (traces.FULL, traces.PSI_CL):
        raise ConfigError("mode must be full or psi_cl")
    speeds = s.str("speeds", "full")
    diag, parts = traces.partition_density(basis, packet, x, t, mode, v_ref)
    if speeds == "full":
        vals = diag[None, :] + sum(parts.values())
        chosen = sorted(parts)
    else:
        scale = math.pi / basis.params["L"] if basis.kind == "ISW" else 1.0
        chosen = []
        vals = np.zeros((t.size, x.size))
        for text in speeds.split(","):
            want = _number(text) * scale
            hit = [v for v in parts if abs(v - want) <= 1e-9 * max(1.0, want)]
            if not hit:
                raise ConfigError(f"no bundle at speed {text}; available: "
                                  + ", ".join(f"{v / scale:.6g}" for v in sorted(parts)))
            chosen.append(hit[0])
            vals = vals + parts[hit[0]]
    g = DensityGrid(x, t, vals, {"basis": basis.ident, "packet": packet.ident, "engine": "traces"})
    return [("", g)], {"basis": basis.ident, "packet": packet.ident, "mode": mode,
                       "speeds": [float(v) for v in chosen], "bundles": len(parts)}


def cmd_revival(s, out):
    f = Fraction.parse(s.str("fraction", "1/4"))
    dec = revivals.revival_coefficients(f)
    lines = [f"p/q = {f}  l = {dec.l}  class = {dec.q_class}"]
    for m, a in enumerate(dec.a):
        if abs(a) > 1e-12:
            lines.append(f"a_{m} = {a.real:+.12f} {a.imag:+.12f}i  |a| = {abs(a):.12f}")
    print("\n".join(lines))
    return [], {"fraction": str(f), "l": dec.l, "class": dec.q_class,
                "nonzero": sum(1 for a in dec.a if abs(a) > 1e-12)}


def cmd_dephase(s, out):
    spec = _beat_spec(s)
    val = beats.dephase_time(spec, s.int("q", 1))
    print(f"t_dephase/T1 = {val:.4f}")
    return [], {"t_dephase_over_T1": val}


def cmd_farey(s, out):
    seq = revivals.farey_listing(s.int("n", 5))
    print(" ".join(str(f) for f in seq))
    return [], {"terms": len(seq)}


HANDLERS = {"carpet": cmd_carpet, "psicl": cmd_psicl, "beats": cmd_beats,
            "traces": cmd_traces, "revival": cmd_revival, "dephase": cmd_dephase,
            "farey": cmd_farey}


# -- output -----------------------------------------------------------------------

def _write_text(path, text):
    try:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _prepare_out(path):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path}: {exc}") from exc
    if not os.access(path, os.W_OK):
        raise ConfigError(f"output directory {path} is not writable")
    return path


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        return float(v) if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (str, int, bool)) or v is None:
        return v
    return str(v)


def run(command, raw):
    """Execute one scenario; returns the summary dict."""
    s = Settings(raw)
    name = s.str("name", command)
    out = raw.get("out")
    if out is None and command in GRID_COMMANDS:
        out = "."
    if out is not None:
        out = _prepare_out(out)
    vmax = s.float("vmax", None)
    digits = s.int("digits", 15)
    start = time.perf_counter()
    grids, extra = HANDLERS[command](s, out)
    wall = time.perf_counter() - start
    files = []
    stats = []
    for suffix, g in grids:
        base = os.path.join(out, name + suffix)
        if g.values.shape[0] > 1 and g.values.shape[1] > 1:
            write_pgm(g, base + ".pgm", vmax)
            files.append(base + ".pgm")
        write_csv(g, base + ".csv", digits)
        files.append(base + ".csv")
        mask = g.mask if g.mask is not None else np.ones(g.values.shape, dtype=bool)
        stats.append({"file": name + suffix, "shape": list(g.values.shape),
                      "max": float(g.values.max()), "min": float(g.values.min()),
                      "mask_coverage": float(mask.mean()), "terms": g.meta.get("terms")})
    inputs = {k: v for k, v in s.raw.items() if k != "out"}
    summary = {"command": command, "name": name, "inputs": inputs,
               "resolved": s.used, "wall_time_s": wall, "grids": stats,
               "files": files, "results": extra}
    summary = _jsonable(summary)
    text = json.dumps(summary, indent=2, sort_keys=True)
    if out is not None:
        _write_text(os.path.join(out, name + ".json"), text + "\n")
    else:
        print(text, file=sys.stderr)
    return summary


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        command, flags = parse_args(argv)
        raw = build_settings(command, flags)
        run(command, raw)
    except CarpetError as exc:
        print(f"carpetforge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"carpetforge: numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
