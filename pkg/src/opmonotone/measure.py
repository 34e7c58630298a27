"""Finite Borel measures on [0, 1], stored as an explicit three-part sum.

A :class:`Measure` is a finite list of point masses, a sum of density terms
``scale * t**(p-1) * (1-t)**(q-1) * h(t)`` restricted to a support interval,
and a sum of self-similar (IFS) measures. The three families are mutually
singular by construction, so decomposition is bookkeeping.

Reflection ``t -> 1 - t`` has to be an exact involution on the stored data.
Floating point ``1 - (1 - t)`` is not always ``t``, so atoms keep their
complement alongside their location and the continuous parts carry a
``reflected`` flag instead of having their parameters rewritten.
"""

from dataclasses import dataclass, field, replace
from functools import lru_cache
import math
from typing import NamedTuple

import numpy as np
from scipy import integrate as _scipy_integrate

from .errors import (
    InvalidMeasure,
    LocationOutOfRange,
    NegativeCoefficient,
    NegativeWeight,
    NonFiniteMass,
    NonIntegrableExponent,
    OverlappingIFSMaps,
    UnknownName,
    ZeroMass,
)
from . import quadrature

__all__ = [
    "Atom",
    "SmoothFactor",
    "DensitySpec",
    "SelfSimilarSpec",
    "Measure",
    "MeasureParts",
    "LoewnerDensity",
    "LoewnerMeasureSpec",
    "make_measure",
    "total_mass",
    "lin_comb",
    "pushforward_reflect",
    "from_loewner",
    "decompose_measure",
    "is_symmetric_measure",
    "normalize",
    "density",
    "compare_measures",
    "measure_leq",
    "lebesgue",
    "dirac",
    "SMOOTH_NAMES",
]

SMOOTH_NAMES = ("const", "inv_t", "log_mean", "power_alpha")


@dataclass(frozen=True)
class Atom:
    """Point mass ``w`` at ``t``; ``tc`` is ``1 - t`` as stored."""

    t: float
    w: float
    tc: float = None

    def __post_init__(self):
        t, w = float(self.t), float(self.w)
        if not (0.0 <= t <= 1.0):
            raise LocationOutOfRange(f"atom location {t} outside [0, 1]")
        if not w >= 0.0:
            raise NegativeWeight(f"atom weight {w} is negative")
        if not math.isfinite(w):
            raise NonFiniteMass(f"atom weight {w} is not finite")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "tc", 1.0 - t if self.tc is None else float(self.tc))

    def reflect(self):
        return Atom(self.tc, self.w, self.t)


@dataclass(frozen=True)
class SmoothFactor:
    """Bounded nonnegative factor ``h`` of a density term.

    ``const``: c. ``inv_t``: c/t. ``power_alpha``: c*sin(alpha*pi)/pi.
    ``log_mean``: c/(t(1-t)(pi**2 + log(t/(1-t))**2)).
    """

    name: str
    c: float = 1.0
    alpha: float | None = None

    def __post_init__(self):
        if self.name not in SMOOTH_NAMES:
            raise UnknownName(f"unknown smooth factor {self.name!r}")
        if not (self.c >= 0 and math.isfinite(self.c)):
            raise NegativeWeight(f"smooth factor constant {self.c} must be >= 0")
        if self.name == "power_alpha":
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise InvalidMeasure("power_alpha needs alpha in (0, 1)")
        elif self.alpha is not None:
            raise InvalidMeasure(f"{self.name} takes no alpha")

    @property
    def symmetric(self):
        """Whether ``h(1 - t) == h(t)``."""
        return self.name != "inv_t"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.name == "const":
            return np.full(t.shape, self.c)
        if self.name == "power_alpha":
            return np.full(t.shape, self.c * math.sin(self.alpha * math.pi) / math.pi)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.name == "inv_t":
                return self.c / t
            # log_mean: the limit at both endpoints is +inf
            lg = np.log(t) - np.log1p(-t)
            val = self.c / (t * (1.0 - t) * (math.pi ** 2 + lg ** 2))
        return np.where((t <= 0.0) | (t >= 1.0), math.inf, val)


@lru_cache(maxsize=256)
def _unit_mass(p, q, smooth, support):
    return float(quadrature.integrate_density(
        DensitySpec(p, q, smooth, support), lambda t: 1.0))


@dataclass(frozen=True)
class DensitySpec:
    """One density term ``scale * t**(p-1) * (1-t)**(q-1) * smooth(t)`` on ``support``.

    With ``reflected`` set the term denotes its mirror image ``g(1 - t)``.
    """

    p: float
    q: float
    smooth: SmoothFactor = SmoothFactor("const")
    support: tuple = (0.0, 1.0)
    scale: float = 1.0
    reflected: bool = False

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        if not (p > 0 and q > 0):
            raise NonIntegrableExponent(f"exponents p={p}, q={q} must be positive")
        a, b = (float(v) for v in self.support)
        if not (0.0 <= a < b <= 1.0):
            raise LocationOutOfRange(f"support [{a}, {b}] is not a subinterval of [0, 1]")
        if not (self.scale >= 0 and math.isfinite(self.scale)):
            raise NegativeWeight(f"density scale {self.scale} must be >= 0")
        if self.smooth.name == "inv_t" and a == 0.0:
            raise NonIntegrableExponent("inv_t is unbounded unless the support excludes 0")
        if self.smooth.name == "log_mean" and (p, q) != (1.0, 1.0):
            raise InvalidMeasure("log_mean carries its own endpoint behaviour; use p = q = 1")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "support", (a, b))
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def shape_key(self):
        return (self.p, self.q, self.smooth, self.support, self.reflected)

    @property
    def left_exponent(self):
        return self.q if self.reflected else self.p

    @property
    def right_exponent(self):
        return self.p if self.reflected else self.q

    @property
    def effective_support(self):
        a, b = self.support
        return (1.0 - b, 1.0 - a) if self.reflected else (a, b)

    @property
    def mass(self):
        return self.scale * _unit_mass(self.p, self.q, self.smooth, self.support)

    @property
    def reflection_invariant(self):
        a, b = self.support
        return self.p == self.q and self.smooth.symmetric and a == 1.0 - b

    def reflect(self):
        if self.reflection_invariant:
            return self
        return replace(self, reflected=not self.reflected)

    def raw(self, t):
        t = np.asarray(t, dtype=float)
        a, b = self.support
        inside = (t >= a) & (t <= b)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = self.scale * t ** (self.p - 1) * (1 - t) ** (self.q - 1) * self.smooth(t)
        return np.where(inside, val, 0.0)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.raw(1.0 - t) if self.reflected else self.raw(t)


@dataclass(frozen=True)
class SelfSimilarSpec:
    """Invariant measure of an IFS of affine contractions, scaled to ``mass``.

    ``maps`` holds ``(ratio, offset, prob)`` for ``t -> ratio * t + offset``.
    The images must be pairwise disjoint and every probability in (0, 1),
    which makes the measure continuous and singular to Lebesgue measure.
    """

    maps: tuple
    mass: float = 1.0
    depth: int = 24
    reflected: bool = False

    def __post_init__(self):
        maps = tuple((float(r), float(d), float(p)) for r, d, p in self.maps)
        if len(maps) < 2:
            raise InvalidMeasure("a self-similar part needs at least two maps")
        for r, d, p in maps:
            if not 0.0 < r < 1.0:
                raise InvalidMeasure(f"map ratio {r} not in (0, 1)")
            if d < 0.0 or d + r > 1.0:
                raise LocationOutOfRange(f"map image [{d}, {d + r}] leaves [0, 1]")
            if not 0.0 < p < 1.0:
                raise InvalidMeasure(f"map probability {p} not in (0, 1)")
        if abs(sum(p for _, _, p in maps) - 1.0) > 1e-12:
            raise InvalidMeasure("map probabilities must sum to 1")
        images = sorted((d, d + r) for r, d, _ in maps)
        for (_, hi), (lo, _) in zip(images, images[1:]):
            if lo <= hi:
                raise OverlappingIFSMaps(f"map images overlap or touch at {lo}")
        if not (self.mass >= 0 and math.isfinite(self.mass)):
            raise NegativeWeight(f"self-similar mass {self.mass} must be >= 0")
        if int(self.depth) < 1:
            raise InvalidMeasure("depth must be a positive integer")
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "mass", float(self.mass))
        object.__setattr__(self, "depth", int(self.depth))

    @classmethod
    def cantor(cls, mass=1.0, depth=24):
        return cls(((1 / 3, 0.0, 0.5), (1 / 3, 2 / 3, 0.5)), mass, depth)

    @property
    def shape_key(self):
        return (self.maps, self.depth, self.reflected)

    @property
    def effective_maps(self):
        if not self.reflected:
            return tuple(sorted(self.maps, key=lambda m: m[1]))
        return tuple(sorted(((r, 1.0 - r - d, p) for r, d, p in self.maps),
                            key=lambda m: m[1]))

    def reflect(self):
        return replace(self, reflected=not self.reflected)


@dataclass(frozen=True)
class Measure:
    """Finite measure on [0, 1]: atoms + density terms + self-similar terms."""

    atoms: tuple = ()
    ac: tuple = ()
    sc: tuple = ()
    mass: float = field(init=False, compare=False)

    def __post_init__(self):
        # an atom's location is the stored pair (t, 1 - t), so that reflection
        # cannot make distinct atoms collide in floating point
        locs = [(a.t, a.tc) for a in self.atoms]
        if len(set(locs)) != len(locs):
            raise InvalidMeasure("atom locations must be pairwise distinct")
        mass = (math.fsum(a.w for a in self.atoms)
                + math.fsum(d.mass for d in self.ac)
                + math.fsum(s.mass for s in self.sc))
        if not math.isfinite(mass):
            raise NonFiniteMass("total mass is not finite")
        object.__setattr__(self, "mass", mass)

    def __repr__(self):
        return (f"Measure(atoms={list(self.atoms)}, ac={list(self.ac)}, "
                f"sc={list(self.sc)}, mass={self.mass:.12g})")


class MeasureParts(NamedTuple):
    ac: Measure
    sd: Measure
    sc: Measure


def _as_tuple(part, kind):
    if part is None:
        return ()
    if isinstance(part, kind):
        return (part,)
    return tuple(part)


def _merged(atoms, ac, sc):
    atom_map = {}
    for a in atoms:
        if a.w == 0.0:
            continue
        key = (a.t, a.tc)
        if key in atom_map:
            prev = atom_map[key]
            atom_map[key] = Atom(prev.t, prev.w + a.w, prev.tc)
        else:
            atom_map[key] = a
    ac_map = {}
    for d in ac:
        if d.scale == 0.0:
            continue
        key = d.shape_key
        ac_map[key] = replace(ac_map[key], scale=ac_map[key].scale + d.scale) if key in ac_map else d
    sc_map = {}
    for s in sc:
        if s.mass == 0.0:
            continue
        key = s.shape_key
        sc_map[key] = replace(sc_map[key], mass=sc_map[key].mass + s.mass) if key in sc_map else s
    return Measure(tuple(atom_map.values()), tuple(ac_map.values()), tuple(sc_map.values()))


def make_measure(atoms=(), ac=None, sc=None):
    """Validated measure from atoms (``Atom`` or ``(t, w)`` pairs) and optional parts.

    ``ac`` and ``sc`` accept a single term or an iterable of terms. Atoms at
    exactly equal locations are merged; zero-weight terms are dropped.
    """
    atom_list = [a if isinstance(a, Atom) else Atom(*a) for a in atoms]
    return _merged(atom_list, _as_tuple(ac, DensitySpec), _as_tuple(sc, SelfSimilarSpec))


def total_mass(mu):
    return mu.mass


def lin_comb(coeffs, measures):
    """Nonnegative combination ``sum c_i * mu_i`` taken part by part."""
    coeffs = [float(c) for c in coeffs]
    measures = list(measures)
    if len(coeffs) != len(measures):
        raise ValueError("coeffs and measures differ in length")
    atoms, ac, sc = [], [], []
    for c, mu in zip(coeffs, measures):
        if not c >= 0:
            raise NegativeCoefficient(f"coefficient {c} is negative")
        if c == 0.0:
            continue
        if c == 1.0:
            atoms += mu.atoms
            ac += mu.ac
            sc += mu.sc
            continue
        atoms += [Atom(a.t, c * a.w, a.tc) for a in mu.atoms]
        ac += [replace(d, scale=c * d.scale) for d in mu.ac]
        sc += [replace(s, mass=c * s.mass) for s in mu.sc]
    return _merged(atoms, ac, sc)


def pushforward_reflect(mu):
    """Image of ``mu`` under ``t -> 1 - t``; an exact involution on the representation."""
    return Measure(tuple(a.reflect() for a in mu.atoms),
                   tuple(d.reflect() for d in mu.ac),
                   tuple(s.reflect() for s in mu.sc))


def decompose_measure(mu):
    """Split into (absolutely continuous, discrete, singular continuous) parts."""
    return MeasureParts(Measure(ac=mu.ac), Measure(atoms=mu.atoms), Measure(sc=mu.sc))


def normalize(mu):
    m = mu.mass
    if not m > 0:
        raise ZeroMass("cannot normalize a measure of zero mass")
    # divide rather than multiply by 1/m, which overflows for subnormal masses
    return _merged([Atom(a.t, a.w / m, a.tc) for a in mu.atoms],
                   [replace(d, scale=d.scale / m) for d in mu.ac],
                   [replace(s, mass=s.mass / m) for s in mu.sc]), m


def density(mu, t):
    """Total density of the absolutely continuous part at ``t``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    for d in mu.ac:
        out = out + d(t)
    return out


def _sample_points(n=257):
    # Chebyshev points of the first kind, mapped to (0, 1)
    k = np.arange(n)
    return 0.5 - 0.5 * np.cos((2 * k + 1) * np.pi / (2 * n))


def _sc_groups(mu, tol):
    groups = []
    for s in mu.sc:
        maps = np.array(s.effective_maps)
        for g in groups:
            if g[0].shape == maps.shape and np.allclose(g[0], maps, rtol=0, atol=tol):
                g[1] += s.mass
                break
        else:
            groups.append([maps, s.mass])
    return groups


def _atoms_leq(mu, nu, tol):
    nu_atoms = [a for a in nu.atoms if a.w > 0]
    for a in mu.atoms:
        if a.w == 0:
            continue
        w_nu = sum(b.w for b in nu_atoms if abs(b.t - a.t) <= tol)
        if a.w > w_nu + tol * max(1.0, a.w):
            return False
    return True


def _density_leq(mu, nu, tol):
    ts = _sample_points()
    g_mu, g_nu = density(mu, ts), density(nu, ts)
    return bool(np.all(g_mu <= g_nu + tol * np.maximum(1.0, np.abs(g_nu))))


def _sc_leq(mu, nu, tol):
    nu_groups = _sc_groups(nu, tol)
    for maps, m in _sc_groups(mu, tol):
        m_nu = sum(g[1] for g in nu_groups
                   if g[0].shape == maps.shape and np.allclose(g[0], maps, rtol=0, atol=tol))
        if m > m_nu + tol * max(1.0, m):
            return False
    return True


def measure_leq(mu, nu, tol=1e-9):
    """Part-wise order: every atom, density value and IFS mass of ``mu`` is dominated by ``nu``."""
    return _atoms_leq(mu, nu, tol) and _density_leq(mu, nu, tol) and _sc_leq(mu, nu, tol)


def compare_measures(mu, nu, tol=1e-9):
    """One of ``"equal"``, ``"leq"``, ``"geq"``, ``"incomparable"`` under the part-wise order."""
    le, ge = measure_leq(mu, nu, tol), measure_leq(nu, mu, tol)
    if le and ge:
        return "equal"
    if le:
        return "leq"
    if ge:
        return "geq"
    return "incomparable"


def is_symmetric_measure(mu, tol=1e-9):
    """Whether ``mu`` is invariant under ``t -> 1 - t`` to within ``tol``.

    Atoms are matched by location and weight, densities are compared at 257
    Chebyshev points with relative tolerance ``tol``, and self-similar parts
    are grouped by their (reflected) maps.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    nu = pushforward_reflect(mu)
    a1 = sorted((a.t, a.w) for a in mu.atoms if a.w > 0)
    a2 = sorted((a.t, a.w) for a in nu.atoms if a.w > 0)
    if len(a1) != len(a2):
        return False
    for (t1, w1), (t2, w2) in zip(a1, a2):
        if abs(t1 - t2) > tol or abs(w1 - w2) > tol * max(w1, w2):
            return False
    ts = _sample_points()
    g1, g2 = density(mu, ts), density(nu, ts)
    scale = np.maximum(np.abs(g1), np.abs(g2))
    if not np.all(np.abs(g1 - g2) <= tol * np.where(scale > 0, scale, 1.0)):
        return False
    return _sc_leq(mu, nu, tol) and _sc_leq(nu, mu, tol)


def lebesgue(mass=1.0):
    return make_measure(ac=DensitySpec(1.0, 1.0, SmoothFactor("const"), scale=mass))


def dirac(t, w=1.0):
    return make_measure([(t, w)])


# -- the classical representation on [0, inf] ---------------------------------

@dataclass(frozen=True)
class LoewnerDensity:
    """Density ``scale * lam**(p-1) * (1+lam)**(-(p+q)) * smooth`` on ``support``.

    This is the image of the [0, 1] density term with exponents ``(p, q)``
    under ``lam = t / (1 - t)``. Only constant smooth factors are accepted,
    since they are the same function in both coordinates.
    """

    p: float
    q: float
    smooth: SmoothFactor = SmoothFactor("const")
    support: tuple = (0.0, math.inf)
    scale: float = 1.0

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0):
            raise NonFiniteMass(f"exponents p={self.p}, q={self.q} give infinite mass")
        if self.smooth.name not in ("const", "power_alpha"):
            raise InvalidMeasure("only constant smooth factors are coordinate-free")
        lo, hi = (float(v) for v in self.support)
        if not 0.0 <= lo < hi <= math.inf:
            raise LocationOutOfRange(f"support [{lo}, {hi}] is not inside [0, inf]")
        if not (self.scale >= 0 and math.isfinite(self.scale)):
            raise NegativeWeight(f"density scale {self.scale} must be >= 0")
        object.__setattr__(self, "support", (lo, hi))

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        c = float(self.smooth(0.5))
        return self.scale * c * lam ** (self.p - 1) * (1 + lam) ** (-(self.p + self.q))

    def integrate(self, g):
        """``integral of g(lam) * density`` by QUADPACK, split at 1 so that the
        algebraic endpoint behaviour at 0 and at infinity goes into the
        ``alg`` weight."""
        lo, hi = self.support
        c = self.scale * float(self.smooth(0.5))
        p, q = self.p, self.q
        total = 0.0
        # [lo, min(hi, 1)] in lam; weight lam**(p-1)
        a, b = lo, min(hi, 1.0)
        if a < b:
            f = lambda lam: (1 + lam) ** (-(p + q)) * g(lam)
            if a == 0.0:
                total += _scipy_integrate.quad(f, 0.0, b, weight="alg", wvar=(p - 1, 0.0),
                                               epsabs=1e-15, epsrel=1e-13, limit=200)[0]
            else:
                total += _scipy_integrate.quad(lambda lam: lam ** (p - 1) * f(lam), a, b,
                                               epsabs=1e-15, epsrel=1e-13, limit=200)[0]
        # [max(lo, 1), hi] via u = 1/lam; weight u**(q-1)
        a, b = max(lo, 1.0), hi
        if a < b:
            u_lo = 0.0 if b == math.inf else 1.0 / b
            u_hi = 1.0 / a
            f = lambda u: (1 + u) ** (-(p + q)) * g(1.0 / u if u > 0 else math.inf)
            if u_lo == 0.0:
                total += _scipy_integrate.quad(f, 0.0, u_hi, weight="alg", wvar=(q - 1, 0.0),
                                               epsabs=1e-15, epsrel=1e-13, limit=200)[0]
            else:
                total += _scipy_integrate.quad(lambda u: u ** (q - 1) * f(u), u_lo, u_hi,
                                               epsabs=1e-15, epsrel=1e-13, limit=200)[0]
        return c * total


@dataclass(frozen=True)
class LoewnerMeasureSpec:
    """Finite measure on [0, inf]: atoms ``(lam, w)``, an atom at infinity, densities."""

    atoms: tuple = ()
    infinity: float = 0.0
    ac: tuple = ()

    def __post_init__(self):
        atoms = tuple((float(l), float(w)) for l, w in self.atoms)
        for lam, w in atoms:
            if not 0.0 <= lam < math.inf:
                raise LocationOutOfRange(f"finite atom location {lam} must lie in [0, inf)")
            if not w >= 0:
                raise NegativeWeight(f"atom weight {w} is negative")
            if not math.isfinite(w):
                raise NonFiniteMass(f"atom weight {w} is not finite")
        if not self.infinity >= 0:
            raise NegativeWeight("weight at infinity is negative")
        if not math.isfinite(self.infinity):
            raise NonFiniteMass("weight at infinity is not finite")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "infinity", float(self.infinity))
        object.__setattr__(self, "ac", _as_tuple(self.ac, LoewnerDensity))

    def total_mass(self):
        return (math.fsum(w for _, w in self.atoms) + self.infinity
                + math.fsum(d.integrate(lambda lam: 1.0) for d in self.ac))

    def evaluate(self, x):
        """``integral of x(lam+1)/(x+lam) d(nu)`` with the kernel at infinity equal to ``x``."""
        x = float(x)

        def kern(lam):
            if x == 0.0:
                return 1.0 if lam == 0.0 else 0.0
            if lam == math.inf:
                return x
            return x * (lam + 1) / (x + lam)

        return (math.fsum(w * kern(lam) for lam, w in self.atoms) + self.infinity * x
                + math.fsum(d.integrate(kern) for d in self.ac))


def from_loewner(nu):
    """Transport ``nu`` on [0, inf] to [0, 1] along ``lam -> lam / (1 + lam)``."""
    if not isinstance(nu, LoewnerMeasureSpec):
        raise TypeError("from_loewner expects a LoewnerMeasureSpec")
    atoms = [Atom(lam / (1 + lam), w, 1 / (1 + lam)) for lam, w in nu.atoms]
    if nu.infinity > 0:
        atoms.append(Atom(1.0, nu.infinity, 0.0))
    ac = []
    for d in nu.ac:
        lo, hi = d.support
        t_lo = lo / (1 + lo)
        t_hi = 1.0 if hi == math.inf else hi / (1 + hi)
        ac.append(DensitySpec(d.p, d.q, d.smooth, (t_lo, t_hi), d.scale))
    mu = _merged(atoms, ac, ())
    if not math.isfinite(mu.mass):
        raise NonFiniteMass("converted measure has infinite mass")
    return mu
