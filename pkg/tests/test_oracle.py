import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pdcschmidt.oracle import (
    AmplitudeGrid,
    UnresolvedGridError,
    gaussian_double,
    gaussian_double_k,
    grid_convergence,
    grid_schmidt,
    grid_schmidt_direct,
    schmidt_spectrum,
)


def _x(w):
    return np.asarray(w)[..., 0]


def test_separable_is_one():
    psi = lambda w1, w2: np.exp(-_x(w1) ** 2) * np.exp(-((_x(w2) - 0.5) ** 2) / 0.3)
    g = AmplitudeGrid.from_function(psi, -6, 6, 200)
    assert grid_schmidt(g) == pytest.approx(1.0, abs=1e-6)


def test_two_equal_modes():
    h0 = lambda x: np.exp(-x * x / 2)
    h1 = lambda x: math.sqrt(2) * x * np.exp(-x * x / 2)
    psi = lambda w1, w2: h0(_x(w1)) * h0(_x(w2)) + h1(_x(w1)) * h1(_x(w2))
    g = AmplitudeGrid.from_function(psi, -8, 8, 300)
    assert grid_schmidt(g) == pytest.approx(2.0, rel=1e-6)
    lam = schmidt_spectrum(g)
    assert lam[1] / lam[0] == pytest.approx(1.0, rel=1e-6)


@pytest.mark.parametrize("a,b", [(10.0, 1.0), (1.0, 10.0), (3.0, 1.0)])
def test_gaussian_double_closed_form(a, b):
    L = 4 * max(a, b)
    g = AmplitudeGrid.from_function(gaussian_double(a, b), -L, L, 800, width=min(a, b))
    assert grid_schmidt(g) == pytest.approx(gaussian_double_k(a, b), rel=1e-4)


def test_index_swap_symmetry():
    g = AmplitudeGrid.from_function(gaussian_double(3.0, 1.0), -12, 12, 200)
    np.testing.assert_allclose(np.abs(g.matrix), np.abs(g.matrix.T), rtol=1e-13)


@given(m=arrays(np.complex128, (7, 7), elements=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)))
def test_svd_and_direct_routes_agree(m):
    if np.abs(m).sum() < 1e-3:
        return
    g = AmplitudeGrid(m, 0.0, 1.0, 0.1)
    assert grid_schmidt(g) == pytest.approx(grid_schmidt_direct(g), rel=1e-8)


@given(c=st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False, allow_infinity=False))
def test_scale_invariance(c):
    g = AmplitudeGrid.from_function(gaussian_double(3.0, 1.0), -12, 12, 120)
    g2 = AmplitudeGrid(g.matrix * c, g.lo, g.hi, g.step)
    assert grid_schmidt(g2) == pytest.approx(grid_schmidt(g), rel=1e-12)


def test_refuses_unresolved_grids():
    with pytest.raises(UnresolvedGridError, match="boundary"):
        AmplitudeGrid.from_function(gaussian_double(3.0, 1.0), -2, 2, 100)
    with pytest.raises(UnresolvedGridError, match="points per feature"):
        AmplitudeGrid.from_function(gaussian_double(3.0, 1.0), -12, 12, 20, width=1.0)
    with pytest.raises(ValueError, match="exceeds"):
        AmplitudeGrid.from_function(gaussian_double(3.0, 1.0), -12, 12, 5000)
    with pytest.raises(ValueError):
        AmplitudeGrid.from_function(gaussian_double(3.0, 1.0), -12, 12, 10, dim=3)


def test_small_2d_grid():
    def psi(w1, w2):
        s = np.asarray(w1) + np.asarray(w2)
        d = np.asarray(w1) - np.asarray(w2)
        return np.exp(-np.sum(s * s, -1) / 4.0 - np.sum(d * d, -1) / 1.0)

    g = AmplitudeGrid.from_function(psi, -7, 7, 36, dim=2)
    k1 = gaussian_double_k(2.0, 1.0)
    assert grid_schmidt(g) == pytest.approx(k1**2, rel=1e-3)


def test_convergence_smooth():
    t = grid_convergence(gaussian_double(3.0, 0.3), -12, 12, (64, 128, 256))
    changes = [r.rel_change for r in t.rows[1:]]
    assert changes[0] >= changes[1]
    assert t.converged and not t.diverging
    assert t.rows[-1].K == pytest.approx(gaussian_double_k(3.0, 0.3), rel=5e-3)


def test_convergence_rank_one():
    psi = lambda w1, w2: np.exp(-_x(w1) ** 2 - _x(w2) ** 2)
    t = grid_convergence(psi, -6, 6, (32, 64, 128))
    assert all(r.K == pytest.approx(1.0, abs=1e-9) for r in t.rows)


def test_convergence_refusals():
    with pytest.raises(UnresolvedGridError):
        grid_convergence(gaussian_double(3.0, 1.0), -2, 2, (64, 128, 256))
    with pytest.raises(ValueError):
        grid_convergence(gaussian_double(3.0, 1.0), -12, 12, (64, 128))
    with pytest.raises(ValueError):
        grid_convergence(gaussian_double(3.0, 1.0), -12, 12, (64, 100, 256))


def test_convergence_flags_divergence():
    h0 = lambda x: np.exp(-x * x / 2)
    h1 = lambda x: math.sqrt(2) * x * np.exp(-x * x / 2)
    weight = {32: 0.0, 64: 0.1, 128: 1.0}

    def psi(w1, w2):
        c = weight[np.shape(w1)[0]]
        return h0(_x(w1)) * h0(_x(w2)) + c * h1(_x(w1)) * h1(_x(w2))

    t = grid_convergence(psi, -8, 8, (32, 64, 128))
    assert t.diverging and not t.converged
