from dataclasses import replace

import numpy as np
import pytest
from hypothesis import strategies as st

from opmonotone.measure import DensitySpec, SelfSimilarSpec, SmoothFactor, make_measure


def cantor_midpoint_sum(h, depth, maps=((1 / 3, 0.0, 0.5), (1 / 3, 2 / 3, 0.5))):
    """Literal recursion I_n(h) = sum_j p_j I_{n-1}(h o map_j), I_0(h) = h(1/2).

    Brute force over all leaves; independent of the adaptive Gauss-rule path.
    """
    pts = np.array([0.5])
    wts = np.array([1.0])
    for _ in range(depth):
        pts = np.concatenate([r * pts + d for r, d, _ in maps])
        wts = np.concatenate([p * wts for _, _, p in maps])
    vals = np.asarray(h(pts), dtype=float)
    return np.tensordot(wts, vals, axes=(0, 0))


def midpoint(fn, a, b, n=200_000):
    x = a + (np.arange(n) + 0.5) * (b - a) / n
    return fn(x).sum() * (b - a) / n


def kernel_np(t, x):
    return x / (t + (1 - t) * x)


@pytest.fixture
def x_grid():
    return 10.0 ** np.arange(-2, 2.0001, 0.25)


# a small vocabulary of density terms with known shapes
DENSITY_TERMS = [
    DensitySpec(1.0, 1.0),
    DensitySpec(0.5, 0.5, SmoothFactor("power_alpha", alpha=0.5)),
    DensitySpec(0.25, 0.75, SmoothFactor("power_alpha", alpha=0.25)),
    DensitySpec(1.0, 1.0, SmoothFactor("inv_t"), (0.5, 1.0)),
    DensitySpec(1.0, 1.0, SmoothFactor("log_mean")),
    DensitySpec(2.0, 1.5, SmoothFactor("const", 0.7), (0.1, 0.9)),
]

weights = st.floats(min_value=0.0, max_value=3.0, allow_nan=False)
locations = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@st.composite
def measures(draw, with_sc=True, max_atoms=4):
    atoms = draw(st.lists(st.tuples(locations, weights), max_size=max_atoms,
                          unique_by=lambda a: a[0]))
    terms = draw(st.lists(st.sampled_from(range(len(DENSITY_TERMS))), max_size=2, unique=True))
    ac = [replace(DENSITY_TERMS[i], scale=draw(weights)) for i in terms]
    sc = []
    if with_sc and draw(st.booleans()):
        sc.append(SelfSimilarSpec.cantor(draw(weights)))
    return make_measure(atoms, ac, sc)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
