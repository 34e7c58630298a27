"""Numerical integration of bounded integrands against the parts of a measure.

Integrands take a 1-D array of nodes ``t`` and return an array whose first
axis runs over the nodes; any trailing axes are integrated component-wise,
so one call can evaluate a function at many points ``x`` or produce a matrix.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import math

import numpy as np
from scipy.special import expit

from .errors import MaxDepthExceeded

__all__ = [
    "QuadratureConfig",
    "DEFAULT_CONFIG",
    "gauss_kronrod",
    "integrate_density",
    "integrate_selfsimilar",
    "integrate_measure",
    "selfsimilar_gauss_rule",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the adaptive rules.

    ``sc_depth`` caps the self-similar recursion; ``None`` defers to the
    ``depth`` stored on each self-similar part.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_depth: int = 50
    sc_depth: int | None = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.sc_depth is not None and self.sc_depth < 1:
            raise ValueError("sc_depth must be >= 1")


DEFAULT_CONFIG = QuadratureConfig()

# 15-point Kronrod extension of the 7-point Gauss-Legendre rule on [-1, 1].
_XK_HALF = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK_HALF = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG_HALF = np.array([
    0.0, 0.129484966168869693270611432679082,
    0.0, 0.279705391489276667901467771423780,
    0.0, 0.381830050505118944950369775488975,
    0.0, 0.417959183673469387755102040816327,
])
_XK = np.concatenate([-_XK_HALF[:-1], _XK_HALF[::-1]])
_WK = np.concatenate([_WK_HALF[:-1], _WK_HALF[::-1]])
_WG = np.concatenate([_WG_HALF[:-1], _WG_HALF[::-1]])


def _expand(w, ndim):
    return w.reshape(w.shape + (1,) * (ndim - w.ndim))


def _call(h, t):
    vals = np.asarray(h(t), dtype=float)
    if vals.ndim == 0:
        vals = np.full(t.shape, float(vals))
    return vals


def _zero_like(h):
    """Zero with the output shape of ``h`` (probed at one interior point)."""
    return np.zeros(_call(h, np.array([0.5])).shape[1:])


def gauss_kronrod(fn, a, b, rel_tol=1e-10, abs_tol=1e-14, max_depth=50):
    """Adaptive G7-K15 integration of ``fn`` over ``[a, b]``.

    All pending intervals of one bisection level are evaluated in a single
    batch. An interval is accepted once ``|K15 - G7|`` is within
    ``max(abs_tol * share, rel_tol * |K15|)`` for every output component,
    where ``share`` is the interval's fraction of ``[a, b]``.

    Returns ``(value, error_estimate)``.
    """
    a, b = float(a), float(b)
    if b == a:
        return _zero_like(fn), 0.0
    span = b - a
    lo = np.array([a])
    hi = np.array([b])
    total = None
    err = 0.0
    for depth in range(max_depth + 1):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        t = mid[:, None] + half[:, None] * _XK[None, :]
        vals = _call(fn, t.ravel())
        vals = vals.reshape(t.shape + vals.shape[1:])
        kron = np.einsum("kj...,j->k...", vals, _WK)
        gauss = np.einsum("kj...,j->k...", vals, _WG)
        kron *= _expand(half, kron.ndim)
        gauss *= _expand(half, gauss.ndim)
        diff = np.abs(kron - gauss)
        tol = np.maximum(_expand(abs_tol * (hi - lo) / span, kron.ndim),
                         rel_tol * np.abs(kron))
        ok = diff <= tol
        if ok.ndim > 1:
            ok = ok.reshape(ok.shape[0], -1).all(axis=1)
        if total is None:
            total = np.zeros(kron.shape[1:])
        total += kron[ok].sum(axis=0)
        err += float(diff[ok].sum())
        if ok.all():
            return total, err
        if depth == max_depth:
            bad = (lo[~ok][0], hi[~ok][0])
            raise MaxDepthExceeded(
                f"no convergence on [{bad[0]:.3g}, {bad[1]:.3g}] after "
                f"{max_depth} bisections")
        keep = ~ok
        lo, hi = (np.concatenate([lo[keep], mid[keep]]),
                  np.concatenate([mid[keep], hi[keep]]))
    raise AssertionError("unreachable")


def _reflected(h):
    return lambda t: h(1.0 - t)


def integrate_density(d, h, cfg=DEFAULT_CONFIG):
    """Integrate ``h`` against one absolutely continuous term ``d``.

    Algebraic endpoint behaviour (non-integer exponent ``p < 3`` at 0 or 1)
    is smoothed by ``t = mid * u**m`` with integer ``m = ceil(3/p)`` (mirrored
    on the right): ``t**(p-1) dt`` becomes ``m mid**p u**(mp-1) du`` with
    ``mp - 1 >= 2``, while ``h(t)`` stays smooth in ``u``. The log-mean
    factor is integrated in the angle variable ``theta`` with
    ``t = expit(pi * tan(theta))``, in which it is uniform.
    """
    if d.reflected:
        h = _reflected(h)
    p, q = d.p, d.q
    a, b = d.support
    smooth = d.smooth
    gk = dict(rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol, max_depth=cfg.max_depth)

    def weighted(weight_fn, tmap):
        def fn(u):
            t = tmap(u)
            vals = _call(h, t)
            return _expand(weight_fn(u, t), vals.ndim) * vals
        return fn

    if smooth.name == "log_mean":
        lo = math.atan(_logit(a) / math.pi)
        hi = math.atan(_logit(b) / math.pi)

        def tmap(theta):
            return expit(math.pi * np.tan(theta))

        def weight(theta, t):
            return np.full(t.shape, smooth.c / math.pi)

        val, _ = gauss_kronrod(weighted(weight, tmap), lo, hi, **gk)
        return d.scale * val

    # non-integer exponents are not smooth at the endpoint even when bounded
    sing_left = a == 0.0 and p < 3 and not float(p).is_integer()
    sing_right = b == 1.0 and q < 3 and not float(q).is_integer()

    def plain(t_lo, t_hi):
        def weight(t, _):
            return t ** (p - 1) * (1 - t) ** (q - 1) * smooth(t)
        return gauss_kronrod(weighted(weight, lambda t: t), t_lo, t_hi, **gk)[0]

    if not (sing_left or sing_right):
        return d.scale * plain(a, b)

    mid = 0.5 * (a + b)
    if sing_left:
        m = math.ceil(3 / p)

        def weight_l(u, t):
            return m * mid ** p * u ** (m * p - 1) * (1 - t) ** (q - 1) * smooth(t)
        left = gauss_kronrod(weighted(weight_l, lambda u: mid * u ** m), 0.0, 1.0, **gk)[0]
    else:
        left = plain(a, mid)
    if sing_right:
        m = math.ceil(3 / q)
        w_r = 1.0 - mid

        def weight_r(u, t):
            return m * w_r ** q * u ** (m * q - 1) * t ** (p - 1) * smooth(t)
        right = gauss_kronrod(
            weighted(weight_r, lambda u: 1.0 - w_r * u ** m), 0.0, 1.0, **gk)[0]
    else:
        right = plain(mid, b)
    return d.scale * (left + right)


def _logit(t):
    if t <= 0.0:
        return -math.inf
    if t >= 1.0:
        return math.inf
    return math.log(t / (1.0 - t))


@lru_cache(maxsize=64)
def selfsimilar_gauss_rule(maps, n=8):
    """Gauss rule with ``n`` nodes for the invariant measure of an IFS.

    ``maps`` is a tuple of ``(ratio, offset, prob)``. Power moments follow
    exactly from self-similarity,
    ``m_k = sum_j p_j * E[(r_j T + d_j)**k]``, and are kept as fractions
    through the Chebyshev algorithm so the recurrence coefficients carry no
    cancellation error. Nodes and weights then come from the Jacobi matrix.
    """
    fr = [(Fraction(r), Fraction(d), Fraction(pr)) for r, d, pr in maps]
    total_p = sum(pr for _, _, pr in fr)
    fr = [(r, d, pr / total_p) for r, d, pr in fr]
    mom = [Fraction(1)]
    for k in range(1, 2 * n):
        acc = Fraction(0)
        for r, d, pr in fr:
            for i in range(k):
                acc += pr * math.comb(k, i) * r ** i * d ** (k - i) * mom[i]
        mom.append(acc / (1 - sum(pr * r ** k for r, _, pr in fr)))

    alpha = [mom[1] / mom[0]]
    beta = [mom[0]]
    sig_prev = [Fraction(0)] * (2 * n)
    sig = list(mom)
    for k in range(1, n):
        sig_new = [Fraction(0)] * (2 * n)
        for l in range(k, 2 * n - k):
            sig_new[l] = sig[l + 1] - alpha[k - 1] * sig[l] - beta[k - 1] * sig_prev[l]
        alpha.append(sig_new[k + 1] / sig_new[k] - sig[k] / sig[k - 1])
        beta.append(sig_new[k] / sig[k - 1])
        sig_prev, sig = sig, sig_new

    jac = np.diag([float(v) for v in alpha])
    off = np.sqrt([float(v) for v in beta[1:]])
    jac += np.diag(off, 1) + np.diag(off, -1)
    nodes, vecs = np.linalg.eigh(jac)
    weights = float(beta[0]) * vecs[0] ** 2
    return nodes, weights / weights.sum()


def integrate_selfsimilar(s, h, depth=None, cfg=DEFAULT_CONFIG):
    """Integrate ``h`` against a self-similar part, ``mass * E[h(T)]``.

    Cells of the attractor are refined by composing the IFS maps, level by
    level, up to ``depth`` levels. Each cell carries a Gauss rule for the
    scaled invariant measure; a cell stops refining early when its rule
    agrees with the sum over its children to the configured tolerance.
    Fully deterministic for a fixed ``depth``.
    """
    if depth is None:
        depth = s.depth
    if s.reflected:
        h = _reflected(h)
    maps = s.maps
    nodes, gw = selfsimilar_gauss_rule(maps)
    ratios = np.array([m[0] for m in maps])
    offsets = np.array([m[1] for m in maps])
    probs = np.array([m[2] for m in maps])

    def rule(scale, shift, weight):
        t = shift[:, None] + scale[:, None] * nodes[None, :]
        vals = _call(h, t.ravel())
        vals = vals.reshape(t.shape + vals.shape[1:])
        out = np.einsum("kj...,j->k...", vals, gw)
        return out * _expand(weight, out.ndim)

    scale = np.array([1.0])
    shift = np.array([0.0])
    weight = np.array([1.0])
    coarse = rule(scale, shift, weight)
    total = np.zeros(coarse.shape[1:])
    nmap = len(maps)
    for level in range(depth):
        # children of cell k are rows k*nmap .. k*nmap + nmap - 1
        c_scale = (scale[:, None] * ratios[None, :]).ravel()
        c_shift = (shift[:, None] + scale[:, None] * offsets[None, :]).ravel()
        c_weight = (weight[:, None] * probs[None, :]).ravel()
        child = rule(c_scale, c_shift, c_weight)
        fine = child.reshape((-1, nmap) + child.shape[1:]).sum(axis=1)
        if level == depth - 1:
            total += fine.sum(axis=0)
            return s.mass * total
        diff = np.abs(fine - coarse)
        tol = np.maximum(_expand(cfg.abs_tol * weight, fine.ndim),
                         cfg.rel_tol * np.abs(fine))
        ok = diff <= tol
        if ok.ndim > 1:
            ok = ok.reshape(ok.shape[0], -1).all(axis=1)
        total += fine[ok].sum(axis=0)
        if ok.all():
            return s.mass * total
        keep = np.repeat(~ok, nmap)
        scale, shift, weight = c_scale[keep], c_shift[keep], c_weight[keep]
        coarse = child[keep]
    return s.mass * (total + coarse.sum(axis=0))


def integrate_measure(mu, h, cfg=DEFAULT_CONFIG):
    """``integral of h d(mu)``: exact atomic sum plus density and self-similar parts."""
    total = _zero_like(h)
    if mu.atoms:
        t = np.array([a.t for a in mu.atoms])
        w = np.array([a.w for a in mu.atoms])
        vals = _call(h, t)
        prods = (vals * _expand(w, vals.ndim)).reshape(len(t), -1)
        # correctly rounded per component, so f(1) equals the stored mass
        atom_sum = np.array([math.fsum(col) for col in prods.T]).reshape(vals.shape[1:])
        total = total + atom_sum
    for d in mu.ac:
        total = total + integrate_density(d, h, cfg)
    for s in mu.sc:
        total = total + integrate_selfsimilar(s, h, cfg.sc_depth, cfg)
    return total
