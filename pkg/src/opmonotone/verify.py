"""Randomized matrix property suites: monotonicity, concavity, calculus agreement.

Each suite returns a report dict ``{suite, trials, worst_margin, threshold,
passed, witness?}``. Trial ``i`` uses dimension ``dims[i % len(dims)]`` and a
seed derived deterministically from the master seed.
"""

import numpy as np

from .matrix import (
    apply_function,
    evaluate_by_matrix_quadrature,
    min_eigenvalue,
    random_ordered_pair,
)
from .quadrature import DEFAULT_CONFIG

__all__ = [
    "trial_pairs",
    "monotonicity_suite",
    "concavity_suite",
    "agreement_suite",
    "run_verification",
    "MONOTONE_TOL",
    "CONCAVE_TOL",
    "AGREEMENT_TOL",
    "CONCAVITY_WEIGHTS",
]

MONOTONE_TOL = 1e-7
CONCAVE_TOL = 1e-7
AGREEMENT_TOL = 1e-6
CONCAVITY_WEIGHTS = (0.25, 0.5, 0.75)


def trial_seeds(seed, trials):
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(trials)] if trials else []


def trial_pairs(dims, trials, seed, scale=1.0):
    """``[(trial, dim, seed, A, B), ...]`` with ``A <= B``."""
    dims = list(dims)
    out = []
    for i, s in enumerate(trial_seeds(seed, trials)):
        n = dims[i % len(dims)]
        a, b = random_ordered_pair(n, scale, s)
        out.append((i, n, s, a, b))
    return out


def _by_dim(pairs):
    groups = {}
    for p in pairs:
        groups.setdefault(p[1], []).append(p)
    return groups


def _maxabs(m):
    return np.abs(m).max(axis=(-1, -2))


def _witness(pair, value, **extra):
    i, n, s, a, b = pair
    w = {"trial": i, "dim": n, "seed": s, "A": a.tolist(), "B": b.tolist(), "value": float(value)}
    w.update(extra)
    return w


def _report(suite, pairs, margins, threshold, witness, lower_is_better=False):
    if not pairs:
        return {"suite": suite, "trials": 0, "worst_margin": None,
                "threshold": threshold, "passed": True}
    rep = {"suite": suite, "trials": len(pairs)}
    if lower_is_better:
        rep["worst_margin"] = float(max(margins))
        rep["passed"] = rep["worst_margin"] <= threshold
    else:
        rep["worst_margin"] = float(min(margins))
        rep["passed"] = rep["worst_margin"] >= -threshold
    rep["threshold"] = threshold
    if witness is not None:
        rep["witness"] = witness
    return rep


def monotonicity_suite(f, pairs, cfg=DEFAULT_CONFIG, tol=MONOTONE_TOL):
    """``min eig(f(B) - f(A)) / (1 + |f(B)|_max) >= -tol`` for every pair."""
    margins, witness = [], None
    for n, group in sorted(_by_dim(pairs).items()):
        a = np.stack([g[3] for g in group])
        b = np.stack([g[4] for g in group])
        fa, fb = apply_function(f, a, cfg), apply_function(f, b, cfg)
        vals = min_eigenvalue(fb - fa) / (1.0 + _maxabs(fb))
        margins.extend(vals.tolist())
        bad = np.flatnonzero(vals < -tol)
        if bad.size and witness is None:
            k = bad[0]
            witness = _witness(group[k], vals[k], f_A=fa[k].tolist(), f_B=fb[k].tolist())
    return _report("monotonicity", pairs, margins, tol, witness)


def concavity_suite(f, pairs, cfg=DEFAULT_CONFIG, tol=CONCAVE_TOL, weights=CONCAVITY_WEIGHTS):
    """``min eig(f(tA + (1-t)B) - t f(A) - (1-t) f(B)) / scale >= -tol``.

    ``scale`` is ``1 + max(|f(A)|_max, |f(B)|_max)``.
    """
    margins, witness = [], None
    for n, group in sorted(_by_dim(pairs).items()):
        a = np.stack([g[3] for g in group])
        b = np.stack([g[4] for g in group])
        fa, fb = apply_function(f, a, cfg), apply_function(f, b, cfg)
        scale = 1.0 + np.maximum(_maxabs(fa), _maxabs(fb))
        for t in weights:
            fm = apply_function(f, t * a + (1.0 - t) * b, cfg)
            vals = min_eigenvalue(fm - t * fa - (1.0 - t) * fb) / scale
            margins.extend(vals.tolist())
            bad = np.flatnonzero(vals < -tol)
            if bad.size and witness is None:
                witness = _witness(group[bad[0]], vals[bad[0]], t=t)
    return _report("concavity", pairs, margins, tol, witness)


def agreement_suite(f, pairs, cfg=DEFAULT_CONFIG, tol=AGREEMENT_TOL):
    """``|f(A) by eigenvalues - f(A) by matrix quadrature|_max / (1 + |f(A)|_max) <= tol``."""
    margins, witness = [], None
    for pair in pairs:
        a = pair[3]
        spectral = apply_function(f, a, cfg)
        quad = evaluate_by_matrix_quadrature(f, a, cfg)
        val = np.abs(spectral - quad).max() / (1.0 + np.abs(spectral).max())
        margins.append(float(val))
        if val > tol and witness is None:
            witness = _witness(pair, val)
    return _report("calculus_quadrature_agreement", pairs, margins, tol, witness,
                   lower_is_better=True)


def run_verification(f, dims, trials, seed, scale=1.0, cfg=DEFAULT_CONFIG, label=""):
    """All suites on one function. The agreement suite needs a measure and is
    skipped for plain callables."""
    pairs = trial_pairs(dims, trials, seed, scale)
    suites = [monotonicity_suite(f, pairs, cfg), concavity_suite(f, pairs, cfg)]
    if hasattr(f, "measure"):
        suites.append(agreement_suite(f, pairs, cfg))
    return {
        "source": label,
        "dims": list(dims),
        "seed": seed,
        "trials": trials,
        "suites": suites,
        "passed": all(s["passed"] for s in suites),
    }
