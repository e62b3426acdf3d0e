"""Experiment configuration: a single JSON document, validated up front."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import VekuaBergmanError
from .geometry import MAX_ORDER, Domain, build_disk, build_rectangle

COEFFICIENT_PRESETS = ("zero", "constant", "constant_a", "main_vekua", "csv")
GENERATORS = ("analytic", "formal_powers")

DEFAULTS = {
    "domain": {"kind": "disk", "center": [0.0, 0.0], "radius": 1.0,
               "radial_order": 64, "angular_order": 128, "interior_margin": None},
    "coefficients": {"preset": "zero"},
    "basis": {"generator": "analytic", "N": 15, "center": None},
    "solver": {"tol": 1e-10, "max_iter": 200, "drop_tol": 1e-8, "exclusion_factor": 0.5},
    "evaluation": {"grid": {"x": [-0.35, 0.35, 5], "y": [-0.35, 0.35, 5]}},
    "certify": {"lattice_h": None, "target_tol": 1e-5},
    "output": {"dir": "out"},
    "seed": 0,
}


class ConfigError(VekuaBergmanError, ValueError):
    pass


def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k not in ("evaluation",):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _num(d, key, lo=None, hi=None, integer=False, allow_none=False):
    v = d.get(key)
    if v is None and allow_none:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key!r} must be a number, got {v!r}")
    if integer and int(v) != v:
        raise ConfigError(f"{key!r} must be an integer, got {v!r}")
    if not np.isfinite(v) or (lo is not None and v < lo) or (hi is not None and v > hi):
        raise ConfigError(f"{key!r} = {v!r} outside [{lo}, {hi}]")
    return int(v) if integer else float(v)


def _pair(v, key):
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise ConfigError(f"{key!r} must be an [x, y] pair, got {v!r}")
    x, y = (_num({key: t}, key) for t in v)
    return [x, y]


@dataclass
class ExperimentConfig:
    """Validated configuration; ``raw`` is the normalized JSON document."""

    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(doc) - set(DEFAULTS) - {"target", "project", "similarity"}
        if unknown:
            raise ConfigError(f"unknown config sections: {sorted(unknown)}")
        raw = _merge(DEFAULTS, doc)
        cfg = cls(raw)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        return copy.deepcopy(self.raw)

    def with_overrides(self, truncation=None, quad_scale=None) -> "ExperimentConfig":
        doc = self.to_dict()
        if truncation is not None:
            doc["basis"]["N"] = truncation
        if quad_scale is not None:
            if not quad_scale > 0:
                raise ConfigError("--quad-scale must be positive")
            keys = (("radial_order", "angular_order") if doc["domain"]["kind"] == "disk"
                    else ("order_x", "order_y"))
            for k in keys:
                doc["domain"][k] = max(1, int(round(doc["domain"][k] * quad_scale)))
        return ExperimentConfig.from_dict(doc)

    # --- validation --------------------------------------------------------

    def validate(self) -> None:
        r = self.raw
        d = r["domain"]
        if d.get("kind") == "disk":
            d["center"] = _pair(d.get("center", [0, 0]), "center")
            d["radius"] = _num(d, "radius", lo=1e-300)
            d["radial_order"] = _num(d, "radial_order", 4, MAX_ORDER, integer=True)
            d["angular_order"] = _num(d, "angular_order", 8, MAX_ORDER, integer=True)
            for k in ("corner_lo", "corner_hi", "order_x", "order_y"):
                d.pop(k, None)
        elif d.get("kind") == "rectangle":
            d["corner_lo"] = _pair(d.get("corner_lo"), "corner_lo")
            d["corner_hi"] = _pair(d.get("corner_hi"), "corner_hi")
            d.setdefault("order_x", 32)
            d.setdefault("order_y", 32)
            d["order_x"] = _num(d, "order_x", 1, MAX_ORDER, integer=True)
            d["order_y"] = _num(d, "order_y", 1, MAX_ORDER, integer=True)
            for k in ("center", "radius", "radial_order", "angular_order"):
                d.pop(k, None)
        else:
            raise ConfigError(f"domain kind must be 'disk' or 'rectangle', got {d.get('kind')!r}")
        d["interior_margin"] = _num(d, "interior_margin", lo=0.0, allow_none=True)

        c = r["coefficients"]
        if c.get("preset") not in COEFFICIENT_PRESETS:
            raise ConfigError(f"coefficient preset must be one of {COEFFICIENT_PRESETS}")
        if c["preset"] in ("constant", "constant_a"):
            c.setdefault("re", 0.0)
            c.setdefault("im", 0.0)
            c["re"], c["im"] = _num(c, "re"), _num(c, "im")
        if c["preset"] == "main_vekua" and c.setdefault("f", "exp_x") not in ("exp_x", "gauss_hyp"):
            raise ConfigError(f"main_vekua f must be 'exp_x' or 'gauss_hyp', got {c['f']!r}")
        if c["preset"] == "csv" and not isinstance(c.get("path"), str):
            raise ConfigError("csv coefficients need a 'path'")

        b = r["basis"]
        if b.get("generator") not in GENERATORS:
            raise ConfigError(f"basis generator must be one of {GENERATORS}")
        b["N"] = _num(b, "N", 0, 200, integer=True)
        if b.get("center") is not None:
            b["center"] = _pair(b["center"], "basis.center")
        if b["generator"] == "analytic" and c["preset"] != "zero":
            raise ConfigError("the analytic generator requires the 'zero' coefficient preset")

        s = r["solver"]
        s["tol"] = _num(s, "tol", 1e-16, 1.0)
        s["max_iter"] = _num(s, "max_iter", 1, 100000, integer=True)
        s["drop_tol"] = _num(s, "drop_tol", 1e-16, 1.0)
        s["exclusion_factor"] = _num(s, "exclusion_factor", 1e-6, 2.0)

        ev = r["evaluation"]
        if "points" in ev:
            if not ev["points"]:
                raise ConfigError("evaluation.points is empty")
            ev["points"] = [_pair(p, "evaluation.points[]") for p in ev["points"]]
        elif "grid" in ev:
            for ax in ("x", "y"):
                g = ev["grid"].get(ax)
                if not (isinstance(g, list) and len(g) == 3):
                    raise ConfigError(f"evaluation.grid.{ax} must be [lo, hi, n]")
                lo, hi, n = g
                ev["grid"][ax] = [_num({"lo": lo}, "lo"), _num({"hi": hi}, "hi"),
                                  _num({"n": n}, "n", 1, 1000, integer=True)]
        else:
            raise ConfigError("evaluation needs 'points' or 'grid'")

        ce = r["certify"]
        ce["lattice_h"] = _num(ce, "lattice_h", lo=1e-6, allow_none=True)
        ce["target_tol"] = _num(ce, "target_tol", lo=0.0)
        r["seed"] = _num(r, "seed", 0, 2 ** 32 - 1, integer=True)
        if not isinstance(r["output"].get("dir"), str):
            raise ConfigError("output.dir must be a string")

    # --- builders ----------------------------------------------------------

    def build_domain(self) -> Domain:
        d = self.raw["domain"]
        if d["kind"] == "disk":
            return build_disk(complex(*d["center"]), d["radius"], d["radial_order"],
                              d["angular_order"], interior_margin=d["interior_margin"])
        return build_rectangle(complex(*d["corner_lo"]), complex(*d["corner_hi"]),
                               d["order_x"], d["order_y"],
                               interior_margin=d["interior_margin"])

    def evaluation_points(self) -> np.ndarray:
        ev = self.raw["evaluation"]
        if "points" in ev:
            return np.array([complex(x, y) for x, y in ev["points"]])
        gx, gy = ev["grid"]["x"], ev["grid"]["y"]
        xs = np.linspace(gx[0], gx[1], gx[2])
        ys = np.linspace(gy[0], gy[1], gy[2])
        # row-major in y then x: rows share a y value
        return (xs[None, :] + 1j * ys[:, None]).ravel()

    @property
    def is_analytic(self) -> bool:
        return self.raw["basis"]["generator"] == "analytic"
