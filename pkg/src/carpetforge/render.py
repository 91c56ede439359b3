"""Grid serialization: 16-bit binary PGM and long-format CSV."""

import numpy as np

from .errors import CarpetError
from .evolve import DensityGrid


class IoError(CarpetError):
    exit_code = 3


def _values(grid):
    v = np.asarray(grid.values, dtype=float)
    if v.ndim == 1:
        v = v[None, :]
    if not np.all(np.isfinite(v)):
        raise IoError("grid contains non-finite values")
    return v


def pgm_bytes(grid, vmax=None):
    """P5 image, one row per t (earliest first), samples round(65535 v / vmax)."""
    v = _values(grid)
    nt, nx = v.shape
    top = float(v.max()) if vmax is None else float(vmax)
    if top > 0:
        pix = np.rint(65535.0 * np.clip(v / top, 0.0, 1.0)).astype(">u2")
    else:
        pix = np.zeros(v.shape, dtype=">u2")
    return f"P5\n{nx} {nt}\n65535\n".encode("ascii") + pix.tobytes()


def write_pgm(grid, path, vmax=None):
    try:
        with open(path, "wb") as fh:
            fh.write(pgm_bytes(grid, vmax))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_pgm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    head, rest = data.split(b"\n", 3)[:3], data.split(b"\n", 3)[3]
    if head[0] != b"P5" or head[2] != b"65535":
        raise IoError("not a 16-bit P5 image")
    nx, nt = (int(s) for s in head[1].split())
    return np.frombuffer(rest, dtype=">u2").reshape(nt, nx)


def _fmt(v, digits):
    return format(float(v), f".{digits}g")


def csv_text(grid, digits=15):
    """``x,t,value`` rows in t-major order with ``digits`` significant digits.

    Fifteen digits reproduce every value to within one part in 1e15; pass
    digits=17 when a bit-exact round trip is required.
    """
    v = _values(grid)
    xs = [_fmt(x, digits) for x in np.atleast_1d(grid.x)]
    lines = ["x,t,value"]
    for t, row in zip(np.atleast_1d(grid.t), v):
        ts = _fmt(t, digits)
        lines.extend(f"{x},{ts},{_fmt(val, digits)}" for x, val in zip(xs, row))
    return "\n".join(lines) + "\n"


def write_csv(grid, path, digits=15):
    try:
        with open(path, "w", newline="\n", encoding="ascii") as fh:
            fh.write(csv_text(grid, digits))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_csv(path):
    """Inverse of ``write_csv`` for rectangular grids."""
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    ts, t_idx = np.unique(rows[:, 1], return_inverse=True)
    nx = rows.shape[0] // ts.size
    x = rows[:nx, 0]
    values = rows[:, 2].reshape(ts.size, nx)
    order = np.argsort(t_idx[::nx], kind="stable")
    return DensityGrid(x, rows[::nx, 1][order], values[order])
