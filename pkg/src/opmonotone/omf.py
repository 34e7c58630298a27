"""Operator monotone functions on [0, inf) through their measures on [0, 1].

A function is stored as its associated measure ``mu`` and evaluated as

    f(x) = integral over [0, 1] of (1 !_t x) d mu(t),

where ``1 !_t x = x / (t + (1 - t) x)`` is the weighted harmonic mean.
"""

from dataclasses import dataclass
import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NotNormalized, NotSymmetric, ParamOutOfRange, UnknownName
from .measure import (
    DensitySpec,
    Measure,
    SelfSimilarSpec,
    SmoothFactor,
    decompose_measure,
    is_symmetric_measure,
    make_measure,
    normalize,
    pushforward_reflect,
)
from .quadrature import DEFAULT_CONFIG, integrate_measure

__all__ = [
    "OMFunction",
    "ConvexDecomposition",
    "FunctionParts",
    "kernel",
    "evaluate",
    "transpose",
    "evaluate_symmetric_form",
    "decompose_function",
    "convex_normalized_decomposition",
    "catalog",
    "closed_form_oracle",
    "is_normalized",
    "is_symmetric_function",
    "CATALOG_NAMES",
    "standard_catalog",
]

NORMALIZED_TOL = 1e-10


def _kernel(t, x):
    # t, x already validated and broadcast-compatible
    den = t + (1.0 - t) * x
    with np.errstate(divide="ignore", invalid="ignore"):
        out = x / den
    return np.where(den > 0, out, 1.0)


def kernel(t, x):
    """Weighted harmonic mean ``1 !_t x = x / (t + (1-t) x)``.

    ``kernel(0, 0) = 1`` and ``kernel(t, 0) = 0`` for ``t > 0``.
    Broadcasts over array arguments.
    """
    t_arr = np.asarray(t, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    if np.any(~((t_arr >= 0) & (t_arr <= 1))):
        raise DomainError("kernel needs 0 <= t <= 1")
    if np.any(~(x_arr >= 0)):
        raise DomainError("kernel needs x >= 0")
    out = _kernel(t_arr, x_arr)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class OMFunction:
    """Operator monotone function on [0, inf) given by its associated measure."""

    measure: Measure
    name: str = ""

    @property
    def cached_mass(self):
        return self.measure.mass

    def __call__(self, x, cfg=DEFAULT_CONFIG):
        return evaluate(self, x, cfg)


def _as_x(x):
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(x_arr >= 0)):
        raise DomainError("operator monotone functions are evaluated at x >= 0")
    return x_arr


def evaluate(f, x, cfg=DEFAULT_CONFIG):
    """``f(x)`` for scalar or array ``x``; arrays are integrated in one pass."""
    x_arr = _as_x(x)
    flat = x_arr.ravel()
    vals = integrate_measure(f.measure, lambda t: _kernel(t[:, None], flat[None, :]), cfg)
    vals = np.asarray(vals).reshape(x_arr.shape)
    return float(vals) if vals.ndim == 0 else vals


def transpose(f):
    """``x -> x f(1/x)``, realized by reflecting the measure."""
    return OMFunction(pushforward_reflect(f.measure), f"transpose({f.name})" if f.name else "")


def evaluate_symmetric_form(f, x, cfg=DEFAULT_CONFIG, tol=1e-9):
    """``(1/2) integral of (1 !_t x) + (x !_t 1) d mu(t)`` for symmetric ``mu``."""
    if not is_symmetric_measure(f.measure, tol):
        raise NotSymmetric("the associated measure is not reflection invariant")
    x_arr = _as_x(x)
    flat = x_arr.ravel()

    def h(t):
        tt = t[:, None]
        return 0.5 * (_kernel(tt, flat[None, :]) + _kernel(1.0 - tt, flat[None, :]))

    vals = np.asarray(integrate_measure(f.measure, h, cfg)).reshape(x_arr.shape)
    return float(vals) if vals.ndim == 0 else vals


class FunctionParts(NamedTuple):
    ac: OMFunction
    sd: OMFunction
    sc: OMFunction


def decompose_function(f):
    """Absolutely continuous, singularly discrete and singular continuous parts of ``f``."""
    parts = decompose_measure(f.measure)
    return FunctionParts(*(OMFunction(m) for m in parts))


@dataclass(frozen=True)
class ConvexDecomposition:
    """``f = k_ac f_ac + k_sd f_sd + k_sc f_sc`` with each present part normalized."""

    k_ac: float
    k_sd: float
    k_sc: float
    ac: OMFunction | None
    sd: OMFunction | None
    sc: OMFunction | None

    @property
    def weights(self):
        return {"ac": self.k_ac, "sd": self.k_sd, "sc": self.k_sc}

    def __call__(self, x, cfg=DEFAULT_CONFIG):
        total = 0.0
        for k, part in ((self.k_ac, self.ac), (self.k_sd, self.sd), (self.k_sc, self.sc)):
            if part is not None:
                total = total + k * evaluate(part, x, cfg)
        return total


def convex_normalized_decomposition(f):
    if not is_normalized(f):
        raise NotNormalized(f"f(1) = {f.cached_mass!r} is not 1")
    ks, parts = [], []
    for part in decompose_measure(f.measure):
        if part.mass > 0:
            normed, k = normalize(part)
            ks.append(k)
            parts.append(OMFunction(normed))
        else:
            ks.append(0.0)
            parts.append(None)
    return ConvexDecomposition(*ks, *parts)


def is_normalized(f):
    return abs(f.cached_mass - 1.0) <= NORMALIZED_TOL


def is_symmetric_function(f, tol=1e-9):
    return is_symmetric_measure(f.measure, tol)


# -- catalog ------------------------------------------------------------------

CATALOG_NAMES = (
    "const", "identity", "affine_mean", "weighted_harmonic", "power",
    "log1p", "log_mean", "log_mean_dual", "cantor",
)


def _param(params, key, default=None):
    val = params.get(key, default)
    if val is None:
        raise ParamOutOfRange(f"missing parameter {key!r}")
    val = float(val)
    if not math.isfinite(val):
        raise ParamOutOfRange(f"parameter {key}={val} is not finite")
    return val


def _unit_t(params, default=None):
    t = _param(params, "t", default)
    if not 0.0 <= t <= 1.0:
        raise ParamOutOfRange(f"t={t} outside [0, 1]")
    return t


def _alpha(params):
    a = _param(params, "alpha")
    if not 0.0 < a < 1.0:
        raise ParamOutOfRange(f"alpha={a} outside (0, 1)")
    return a


def catalog(name, **params):
    """Named operator monotone function with its known associated measure.

    ``affine_mean`` is ``(1-t) + t x`` (default ``t = 1/2``); ``weighted_harmonic``
    is ``1 !_t x``; ``power`` is ``x**alpha``; ``cantor`` takes ``mass`` and
    ``depth``.
    """
    if name == "const":
        mu = make_measure([(0.0, 1.0)])
    elif name == "identity":
        mu = make_measure([(1.0, 1.0)])
    elif name == "affine_mean":
        t = _unit_t(params, 0.5)
        mu = make_measure([(0.0, 1.0 - t), (1.0, t)])
    elif name == "weighted_harmonic":
        mu = make_measure([(_unit_t(params), 1.0)])
    elif name == "power":
        a = _alpha(params)
        mu = make_measure(ac=DensitySpec(a, 1.0 - a, SmoothFactor("power_alpha", alpha=a)))
    elif name == "log1p":
        mu = make_measure(ac=DensitySpec(1.0, 1.0, SmoothFactor("inv_t"), (0.5, 1.0)))
    elif name == "log_mean":
        mu = make_measure(ac=DensitySpec(1.0, 1.0, SmoothFactor("log_mean")))
    elif name == "log_mean_dual":
        mu = make_measure(ac=DensitySpec(1.0, 1.0))
    elif name == "cantor":
        mass = _param(params, "mass", 1.0)
        if mass < 0:
            raise ParamOutOfRange(f"mass={mass} is negative")
        depth = int(_param(params, "depth", 24))
        if depth < 1:
            raise ParamOutOfRange("depth must be >= 1")
        mu = make_measure(sc=SelfSimilarSpec.cantor(mass, depth))
    else:
        raise UnknownName(f"unknown catalog function {name!r}")
    label = name + "".join(f",{k}={v:g}" for k, v in sorted(params.items()) if v is not None)
    return OMFunction(mu, label)


def standard_catalog():
    """Fixed set of catalog instances used by the property suites."""
    return [
        catalog("const"),
        catalog("identity"),
        catalog("affine_mean", t=0.5),
        catalog("weighted_harmonic", t=0.3),
        catalog("power", alpha=0.25),
        catalog("power", alpha=0.5),
        catalog("power", alpha=0.75),
        catalog("log1p"),
        catalog("log_mean"),
        catalog("log_mean_dual"),
        catalog("cantor", mass=1.0),
    ]


def closed_form_oracle(name, x, **params):
    """Direct analytic value of the catalog function ``name`` at ``x``.

    Removable singularities are filled in: ``log_mean`` and ``log_mean_dual``
    are 1 at ``x = 1`` and 0 at ``x = 0``.
    """
    x_arr = _as_x(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        if name == "const":
            out = np.ones_like(x_arr)
        elif name == "identity":
            out = x_arr.copy()
        elif name == "affine_mean":
            t = _unit_t(params, 0.5)
            out = (1.0 - t) + t * x_arr
        elif name == "weighted_harmonic":
            out = _kernel(_unit_t(params), x_arr)
        elif name == "power":
            out = x_arr ** _alpha(params)
        elif name == "log1p":
            out = np.log1p(x_arr)
        elif name == "log_mean":
            lg = np.log1p(x_arr - 1.0)
            out = np.where(x_arr == 1.0, 1.0, (x_arr - 1.0) / lg)
            out = np.where(x_arr == 0.0, 0.0, out)
        elif name == "log_mean_dual":
            lg = np.log1p(x_arr - 1.0)
            out = np.where(x_arr == 1.0, 1.0, x_arr * lg / (x_arr - 1.0))
            out = np.where(x_arr == 0.0, 0.0, out)
        elif name == "cantor":
            raise UnknownName("the Cantor function has no closed form")
        else:
            raise UnknownName(f"unknown catalog function {name!r}")
    return float(out) if out.ndim == 0 else out
