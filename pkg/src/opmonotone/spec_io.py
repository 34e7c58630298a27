"""JSON measure specs.

A [0, 1] measure::

    {"atoms": [{"t": 0.5, "w": 1.0}],
     "ac": {"p": 1.0, "q": 1.0, "support": [0, 1], "smooth": {"name": "const", "c": 1.0}},
     "sc": {"kind": "cantor", "mass": 0.2, "depth": 24}}

``ac`` and ``sc`` may also be lists of terms. Density terms accept optional
``scale`` and ``reflected``; self-similar terms accept ``"kind": "ifs"`` with
``"maps": [{"r": ..., "d": ..., "p": ...}]``.

A measure on [0, inf] (for ``convert --from loewner``)::

    {"atoms": [{"lambda": 1.0, "w": 1.0}], "infinity": 2.0,
     "ac": {"p": 0.5, "q": 0.5, "support": [0, "inf"], "smooth": {"name": "power_alpha", "alpha": 0.5}}}
"""

import json
import math

from .errors import InvalidSpec, OMFError
from .measure import (
    Atom,
    DensitySpec,
    LoewnerDensity,
    LoewnerMeasureSpec,
    SelfSimilarSpec,
    SmoothFactor,
    make_measure,
)

__all__ = [
    "measure_from_dict",
    "measure_to_dict",
    "loewner_from_dict",
    "load_measure",
    "load_loewner",
]

_CANTOR_MAPS = SelfSimilarSpec.cantor().maps


def _number(v, what):
    if isinstance(v, str) and v.lower() in ("inf", "infinity"):
        return math.inf
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InvalidSpec(f"{what} must be a number, got {v!r}")
    return float(v)


def _terms(obj):
    if obj is None:
        return []
    return obj if isinstance(obj, list) else [obj]


def _smooth(obj):
    if obj is None:
        return SmoothFactor("const")
    if not isinstance(obj, dict) or "name" not in obj:
        raise InvalidSpec("smooth factor must be an object with a 'name'")
    alpha = obj.get("alpha")
    return SmoothFactor(obj["name"], _number(obj.get("c", 1.0), "smooth.c"),
                        None if alpha is None else _number(alpha, "smooth.alpha"))


def _smooth_to_dict(s):
    out = {"name": s.name, "c": s.c}
    if s.alpha is not None:
        out["alpha"] = s.alpha
    return out


def measure_from_dict(obj):
    if not isinstance(obj, dict):
        raise InvalidSpec("measure spec must be a JSON object")
    unknown = set(obj) - {"atoms", "ac", "sc"}
    if unknown:
        raise InvalidSpec(f"unknown measure spec keys: {sorted(unknown)}")
    try:
        atoms = [Atom(_number(a["t"], "atom t"), _number(a["w"], "atom w"))
                 for a in obj.get("atoms", [])]
        ac = []
        for d in _terms(obj.get("ac")):
            support = d.get("support", [0.0, 1.0])
            ac.append(DensitySpec(
                _number(d["p"], "ac.p"), _number(d["q"], "ac.q"), _smooth(d.get("smooth")),
                tuple(_number(v, "ac.support") for v in support),
                _number(d.get("scale", 1.0), "ac.scale"), bool(d.get("reflected", False))))
        sc = []
        for s in _terms(obj.get("sc")):
            kind = s.get("kind", "cantor")
            if kind == "cantor":
                maps = _CANTOR_MAPS
            elif kind == "ifs":
                maps = tuple((_number(m["r"], "map r"), _number(m["d"], "map d"),
                              _number(m["p"], "map p")) for m in s["maps"])
            else:
                raise InvalidSpec(f"unknown self-similar kind {kind!r}")
            sc.append(SelfSimilarSpec(maps, _number(s.get("mass", 1.0), "sc.mass"),
                                      int(s.get("depth", 24)), bool(s.get("reflected", False))))
    except (KeyError, TypeError) as exc:
        raise InvalidSpec(f"malformed measure spec: {exc!r}") from exc
    except OMFError as exc:
        if isinstance(exc, InvalidSpec):
            raise
        raise InvalidSpec(str(exc)) from exc
    return make_measure(atoms, ac, sc)


def measure_to_dict(mu):
    out = {"atoms": [{"t": a.t, "w": a.w} for a in mu.atoms]}
    ac = []
    for d in mu.ac:
        term = {"p": d.p, "q": d.q, "support": list(d.support),
                "smooth": _smooth_to_dict(d.smooth), "scale": d.scale}
        if d.reflected:
            term["reflected"] = True
        ac.append(term)
    sc = []
    for s in mu.sc:
        if s.maps == _CANTOR_MAPS:
            term = {"kind": "cantor"}
        else:
            term = {"kind": "ifs", "maps": [{"r": r, "d": d, "p": p} for r, d, p in s.maps]}
        term.update(mass=s.mass, depth=s.depth)
        if s.reflected:
            term["reflected"] = True
        sc.append(term)
    out["ac"] = ac
    out["sc"] = sc
    return out


def loewner_from_dict(obj):
    if not isinstance(obj, dict):
        raise InvalidSpec("Loewner spec must be a JSON object")
    try:
        atoms = []
        infinity = _number(obj.get("infinity", 0.0), "infinity")
        for a in obj.get("atoms", []):
            lam = _number(a["lambda"], "atom lambda")
            w = _number(a["w"], "atom w")
            if lam == math.inf:
                infinity += w
            else:
                atoms.append((lam, w))
        ac = []
        for d in _terms(obj.get("ac")):
            support = d.get("support", [0.0, "inf"])
            ac.append(LoewnerDensity(
                _number(d["p"], "ac.p"), _number(d["q"], "ac.q"), _smooth(d.get("smooth")),
                tuple(_number(v, "ac.support") for v in support),
                _number(d.get("scale", 1.0), "ac.scale")))
        return LoewnerMeasureSpec(tuple(atoms), infinity, tuple(ac))
    except (KeyError, TypeError) as exc:
        raise InvalidSpec(f"malformed Loewner spec: {exc!r}") from exc
    except OMFError as exc:
        if isinstance(exc, InvalidSpec):
            raise
        raise InvalidSpec(str(exc)) from exc


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidSpec(f"cannot read spec {path}: {exc}") from exc


def load_measure(path):
    return measure_from_dict(_load(path))


def load_loewner(path):
    return loewner_from_dict(_load(path))
