"""Function calculus on real symmetric matrices and the Loewner order.

Matrices are plain ``numpy`` arrays. Every routine also accepts a stack of
matrices with shape ``(..., n, n)`` and works on all of them at once.
"""

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeSpectrum,
    NoConvergence,
    NotPositiveDefinite,
    NotSymmetric,
)
from .quadrature import DEFAULT_CONFIG, integrate_measure

__all__ = [
    "MAX_DIM",
    "as_symmetric",
    "sym_eigen",
    "apply_function",
    "weighted_harmonic_mean",
    "loewner_leq",
    "min_eigenvalue",
    "random_ordered_pair",
    "evaluate_by_matrix_quadrature",
    "symmetrize",
]

MAX_DIM = 16
SYM_RTOL = 1e-14
MAX_SWEEPS = 100


def symmetrize(a):
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def as_symmetric(a):
    """Validate a (stack of) square symmetric matrices and return it as float."""
    a = np.array(a, dtype=float)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionMismatch(f"expected square matrices, got shape {a.shape}")
    n = a.shape[-1]
    if not 1 <= n <= MAX_DIM:
        raise DimensionMismatch(f"dimension {n} outside 1..{MAX_DIM}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    asym = np.abs(a - np.swapaxes(a, -1, -2)).max(axis=(-1, -2))
    scale = np.abs(a).max(axis=(-1, -2))
    if np.any(asym > SYM_RTOL * scale):
        raise NotSymmetric("matrix is not symmetric")
    return symmetrize(a)


def sym_eigen(a):
    """Eigen-decomposition ``A = V diag(w) V^T`` by cyclic Jacobi rotations.

    Sweeps over all ``(p, q)`` pairs until the off-diagonal Frobenius norm is
    below ``1e-14 * ||A||_F``. Eigenvalues come back ascending.
    """
    a = as_symmetric(a)
    batch_shape = a.shape[:-2]
    n = a.shape[-1]
    m = a.reshape((-1, n, n)).copy()
    v = np.broadcast_to(np.eye(n), m.shape).copy()
    frob = np.sqrt((m ** 2).sum(axis=(1, 2)))
    offmask = ~np.eye(n, dtype=bool)
    for _ in range(MAX_SWEEPS):
        off = np.sqrt((m[:, offmask] ** 2).sum(axis=1))
        if np.all(off <= 1e-14 * frob):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[:, p, q]
                active = apq != 0.0
                if not active.any():
                    continue
                app, aqq = m[:, p, p], m[:, q, q]
                with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                    tau = (aqq - app) / (2.0 * apq)
                    t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
                t = np.where(active, t, 0.0)
                t = np.where(np.isfinite(tau), t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                cc, ss = c[:, None], s[:, None]
                col_p, col_q = m[:, :, p].copy(), m[:, :, q].copy()
                m[:, :, p] = cc * col_p - ss * col_q
                m[:, :, q] = ss * col_p + cc * col_q
                row_p, row_q = m[:, p, :].copy(), m[:, q, :].copy()
                m[:, p, :] = cc * row_p - ss * row_q
                m[:, q, :] = ss * row_p + cc * row_q
                m[:, p, q] = m[:, q, p] = np.where(active, 0.0, m[:, p, q])
                vp, vq = v[:, :, p].copy(), v[:, :, q].copy()
                v[:, :, p] = cc * vp - ss * vq
                v[:, :, q] = ss * vp + cc * vq
    else:
        raise NoConvergence(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")
    w = np.diagonal(m, axis1=1, axis2=2).copy()
    order = np.argsort(w, axis=1)
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w.reshape(batch_shape + (n,)), v.reshape(batch_shape + (n, n))


def _reassemble(vals, vecs):
    return symmetrize(np.einsum("...ij,...j,...kj->...ik", vecs, vals, vecs))


def _scale(a):
    return 1.0 + np.abs(a).max(axis=(-1, -2))


def apply_function(f, a, cfg=DEFAULT_CONFIG):
    """``f(A) = V diag(f(w)) V^T``.

    ``f`` is an :class:`~opmonotone.omf.OMFunction` or any vectorized callable
    on eigenvalues. All eigenvalues of a stack are evaluated in one call.
    """
    w, v = sym_eigen(a)
    floor = -1e-12 * _scale(np.asarray(a, dtype=float))
    if np.any(w.min(axis=-1) < floor):
        raise NegativeSpectrum("function calculus needs a positive semidefinite matrix")
    w = np.maximum(w, 0.0)
    if hasattr(f, "measure"):
        from .omf import evaluate
        fw = evaluate(f, w, cfg)
    else:
        fw = np.asarray(f(w), dtype=float)
    return _reassemble(fw, v)


def _inverse(a):
    w, v = sym_eigen(a)
    return _reassemble(1.0 / w, v)


def _require_pd(a, name):
    w, _ = sym_eigen(a)
    if np.any(w.min(axis=-1) <= 1e-12 * _scale(a)):
        raise NotPositiveDefinite(f"{name} is not positive definite")


def weighted_harmonic_mean(a, b, t):
    """``A !_t B = ((1-t) A^{-1} + t B^{-1})^{-1}``; ``t = 0`` gives A and ``t = 1`` gives B."""
    a, b = as_symmetric(a), as_symmetric(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t={t} outside [0, 1]")
    if t == 0.0:
        return a
    if t == 1.0:
        return b
    _require_pd(a, "A")
    _require_pd(b, "B")
    return _inverse((1.0 - t) * _inverse(a) + t * _inverse(b))


def min_eigenvalue(a):
    return sym_eigen(a)[0][..., 0]


def loewner_leq(a, b, tol_scale=1e-9):
    """``A <= B`` in the Loewner order, up to ``tol_scale * (1 + max(|A|, |B|))``."""
    a, b = as_symmetric(a), as_symmetric(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    bound = -tol_scale * (1.0 + np.maximum(np.abs(a).max(axis=(-1, -2)),
                                           np.abs(b).max(axis=(-1, -2))))
    res = min_eigenvalue(b - a) >= bound
    return bool(res) if np.ndim(res) == 0 else res


def _haar_orthogonal(rng, n):
    z = rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * np.sign(np.diag(r))


def random_ordered_pair(dim, scale=1.0, seed=0):
    """Deterministic pair ``A <= B`` with ``A`` positive definite, ``B = A + C``.

    ``A`` has eigenvalues uniform in ``(0, scale/2]`` and ``C`` uniform in
    ``[0, scale/2]``, each in its own Haar-random eigenbasis, so both spectra
    lie in ``(0, scale]``.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    half = 0.5 * scale
    ea = half * (1.0 - rng.random(dim))
    ec = half * rng.random(dim)
    qa = _haar_orthogonal(rng, dim)
    qc = _haar_orthogonal(rng, dim)
    a = symmetrize((qa * ea) @ qa.T)
    c = symmetrize((qc * ec) @ qc.T)
    return a, a + c


def evaluate_by_matrix_quadrature(f, a, cfg=DEFAULT_CONFIG):
    """``f(A) = integral of I !_t A d mu(t)`` with ``I !_t A = A (tI + (1-t)A)^{-1}``.

    The integrand is formed by linear solves at each node, independently of
    the eigen-decomposition used by :func:`apply_function`.
    """
    a = as_symmetric(a)
    if a.ndim != 2:
        raise DimensionMismatch("evaluate_by_matrix_quadrature takes a single matrix")
    _require_pd(a, "A")
    n = a.shape[0]
    eye = np.eye(n)

    def h(t):
        mats = t[:, None, None] * eye + (1.0 - t)[:, None, None] * a
        return np.linalg.solve(mats, np.broadcast_to(a, mats.shape))

    return symmetrize(np.asarray(integrate_measure(f.measure, h, cfg)))
