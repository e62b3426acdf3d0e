"""CSV and JSON readers/writers used by the command line.

Floats are written with ``repr`` (shortest round-trip form), so identical
inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
from scipy.interpolate import LinearNDInterpolator, NearestNDInterpolator
from scipy.spatial import cKDTree

from .errors import DomainMismatchError
from .geometry import Domain
from .gridfn import CoefficientPair, GridFunction

NODE_MATCH_TOL = 1e-12


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def read_csv(path, required) -> dict:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in required if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        rows = list(reader)
    return {c: np.array([float(r[c]) for r in rows]) for c in reader.fieldnames}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    return obj


def write_json(path, doc) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def match_nodes(domain: Domain, x, y) -> np.ndarray:
    """Index of each domain node in the ``(x, y)`` samples.

    Every node must appear (within ``NODE_MATCH_TOL``) exactly once.
    """
    pts = np.asarray(x) + 1j * np.asarray(y)
    if pts.size != domain.size:
        raise DomainMismatchError(
            f"input has {pts.size} samples but the domain has {domain.size} nodes")
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    dist, idx = tree.query(np.column_stack([domain.nodes.real, domain.nodes.imag]))
    scale = max(1.0, float(np.abs(domain.nodes).max()))
    if dist.max() > NODE_MATCH_TOL * scale or np.unique(idx).size != idx.size:
        j = int(np.argmax(dist))
        raise DomainMismatchError(
            f"input samples do not cover node {complex(domain.nodes[j])!r} "
            f"(nearest sample at distance {dist[j]:.3e})")
    return idx


def read_grid_function(path, domain: Domain) -> GridFunction:
    """Read ``x,y,re,im`` samples that cover the domain's nodes exactly."""
    cols = read_csv(path, ("x", "y", "re", "im"))
    idx = match_nodes(domain, cols["x"], cols["y"])
    return GridFunction(domain, cols["re"][idx] + 1j * cols["im"][idx])


def write_grid_function(path, W: GridFunction, extra=None) -> None:
    rows = []
    for j, (z, v) in enumerate(zip(W.domain.nodes, W.values)):
        row = [z.real, z.imag, v.real, v.imag]
        if extra is not None:
            row += [e[j] for e in extra.values()]
        rows.append(row)
    write_csv(path, ["x", "y", "re", "im"] + list(extra or {}), rows)


class _Scattered:
    """Piecewise-linear interpolant of scattered complex samples."""

    def __init__(self, pts, vals):
        xy = np.column_stack([pts.real, pts.imag])
        self._lin = LinearNDInterpolator(xy, vals)
        self._near = NearestNDInterpolator(xy, vals)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        xy = np.column_stack([flat.real, flat.imag])
        out = self._lin(xy)
        bad = ~np.isfinite(out)
        if bad.any():
            out[bad] = self._near(xy[bad])
        return out.reshape(z.shape)


def read_coefficients(path, domain: Domain) -> CoefficientPair:
    """Coefficients from ``x,y,a_re,a_im,b_re,b_im`` samples.

    Off-sample values are linearly interpolated; ``M`` is estimated and
    flagged as such.
    """
    cols = read_csv(path, ("x", "y", "a_re", "a_im", "b_re", "b_im"))
    pts = cols["x"] + 1j * cols["y"]
    a = _Scattered(pts, cols["a_re"] + 1j * cols["a_im"])
    b = _Scattered(pts, cols["b_re"] + 1j * cols["b_im"])
    return CoefficientPair.estimated(a, b, domain, name="csv", params=(("path", str(path)),))
