import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tripledeck import spectral as sp
from tripledeck.errors import ConfigurationError


def direct_dft(grid, samples):
    """Literal sum_j f(x_j) exp(-i xi x_j) dx."""
    x = grid.x
    return np.array([np.sum(samples * np.exp(-1j * xi * x)) * grid.dx for xi in grid.xi])


def test_grid_validation():
    for bad in ({"n_modes": 12}, {"n_modes": 4}, {"n_y": 8}, {"y_max": 5.0}):
        with pytest.raises(ConfigurationError):
            sp.Grid(**bad)


def test_grid_layout():
    g = sp.Grid(16, 20.0, 33, 12.0)
    assert g.y[0] == 0.0 and g.y[-1] == 12.0
    assert np.allclose(np.diff(g.y), g.dy)
    assert np.count_nonzero(g.k == 0) == 1
    assert g.dxi == pytest.approx(1 / 20.0)


def test_forward_matches_direct_dft(rng):
    g = sp.Grid(16)
    f = rng.normal(size=16)
    assert np.max(np.abs(sp.forward_transform(g, f) - direct_dft(g, f))) < 1e-12


def test_cosine_concentrates_on_first_pair():
    g = sp.Grid(32)
    c = sp.forward_transform(g, np.cos(g.x / g.L_x))
    k1 = np.flatnonzero(np.abs(g.k) == 1)
    rest = np.ones(32, bool)
    rest[k1] = False
    assert np.max(np.abs(c[rest])) < 1e-12
    assert c[1] == pytest.approx(np.conj(c[-1]), abs=1e-14)
    assert abs(c[1]) == pytest.approx(np.pi * g.L_x)


def test_zero_and_round_trip(rng):
    g = sp.Grid(64, 20.0, 16, 8.0)
    assert np.all(sp.forward_transform(g, np.zeros(64)) == 0)
    f = rng.normal(size=(64, 16))
    back = sp.inverse_transform(g, sp.forward_transform(g, f))
    assert np.max(np.abs(back - f)) < 1e-13 * np.max(np.abs(f))
    assert sp.hermitian_defect(sp.forward_transform(g, f)) < 1e-13


def test_symbols():
    g = sp.Grid(64)
    f = np.zeros(64, complex)
    i = 5
    f[i] = 1.0
    assert sp.apply_multiplier(g, f, "abs_xi")[i] == pytest.approx(abs(g.xi[i]))
    h = np.random.default_rng(0).normal(size=64) + 0j
    assert np.array_equal(sp.apply_multiplier(g, h, "exp", tau=0.0), h)


def test_skew_sine():
    g = sp.Grid(64)
    a = sp.forward_transform(g, np.sin(3 * g.x / g.L_x))
    b = 1j * g.xi_odd * np.abs(g.xi) * a
    assert abs(np.sum(a * np.conj(b)).real) < 1e-13 * np.sum(np.abs(a) ** 2)


def test_convolution_single_modes():
    g = sp.Grid(32, 20.0, 16, 8.0)
    f = g.zeros()
    f[1] = f[-1] = 1.0
    out = sp.convolve(g, f, f)
    # cos * cos = (1 + cos 2x) / 2 with the transform normalization
    assert out[2, 3] == pytest.approx(g.conv_weight)
    assert out[0, 3] == pytest.approx(2 * g.conv_weight)
    c = 1.7
    mean = g.zeros()
    mean[0] = c
    h = g.zeros()
    h[3] = 2.0
    h[-3] = 2.0
    assert np.allclose(sp.convolve(g, mean, h), c * h * g.conv_weight)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_convolution_matches_direct(seed):
    from tripledeck.selftest import random_state

    g = sp.Grid(32, 20.0, 64, 12.0)
    r = np.random.default_rng(seed)
    f, _ = random_state(g, r)
    h, _ = random_state(g, r)
    assert np.max(np.abs(sp.convolve(g, f, h) - sp.convolve_direct(g, f, h))) < 1e-12


def test_y_derivatives_exact_on_polynomials():
    g = sp.Grid(8, 20.0, 65, 12.0)
    y = np.broadcast_to(g.y, (8, 65))
    assert np.allclose(sp.ddy(g, y), 1.0, atol=1e-13)
    assert np.allclose(sp.d2dy2(g, y**2)[:, 1:-1], 2.0, atol=1e-10)


@pytest.mark.parametrize("op,exact", [
    (sp.ddy, lambda y: -2 * y * np.exp(-y * y)),
    (sp.d2dy2, lambda y: (4 * y * y - 2) * np.exp(-y * y)),
])
def test_y_derivatives_second_order(op, exact):
    errs = []
    for n in (129, 257, 513):
        g = sp.Grid(8, 20.0, n, 12.0)
        errs.append(np.max(np.abs(op(g, np.exp(-g.y**2)[None, :])[0] - exact(g.y))))
    order = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(order > 1.9)


def test_integrate_y():
    g = sp.Grid(8, 20.0, 2048, 12.0)
    one = np.ones((8, 2048))
    assert np.allclose(sp.integrate_y(g, one)[0], g.y, atol=1e-12)
    val = sp.integrate_y(g, np.exp(-g.y**2 / 2)[None, :], "inf")[0]
    assert val == pytest.approx(np.sqrt(np.pi / 2), abs=1e-6)
    errs = []
    for n in (129, 257):
        gg = sp.Grid(8, 20.0, n, 12.0)
        f = np.exp(-(gg.y - 3) ** 2)[None, :]
        errs.append(np.max(np.abs(sp.integrate_y(gg, sp.ddy(gg, f)) - (f - f[:, :1]))))
    assert errs[1] < errs[0] / 3.5


def test_compact_laplacian_fourth_order():
    errs = []
    for n in (129, 257):
        g = sp.Grid(8, 20.0, n, 12.0)
        # the mass matrix closes with f'' = 0 on the walls, which sin satisfies
        q = 3 * np.pi / g.y_max
        f = np.sin(q * g.y)[None, :]
        exact = -q * q * np.sin(q * g.y)
        errs.append(np.max(np.abs(sp.laplacian_compact(g, f)[0, 1:-1] - exact[1:-1])))
    assert np.log2(errs[0] / errs[1]) > 3.8


def test_cn_step_solves_pencil():
    g = sp.Grid(8, 20.0, 64, 12.0)
    op = sp.CompactOperator(g, 0.01)
    rng = np.random.default_rng(1)
    f = rng.normal(size=(8, 64)) + 0j
    f[:, 0] = f[:, -1] = 0
    F = rng.normal(size=(8, 64)) + 0j
    new = op.cn_step(f, F)
    # M (new - f) = dt/2 D (new + f) + dt M F on interior rows
    lhs = op.mass(new - f)
    rhs = 0.005 * op.second_difference(new + f) + 0.01 * op.mass(F)
    assert np.max(np.abs(lhs - rhs)) < 1e-12
    assert np.all(new[:, [0, -1]] == 0)


def test_dealias_and_hermitian_preserved(rng):
    from tripledeck.selftest import random_state

    g = sp.Grid(32, 20.0, 64, 12.0)
    f, _ = random_state(g, rng)
    h, _ = random_state(g, rng)
    out = sp.convolve(g, f, h)
    assert sp.hermitian_defect(out) < 1e-13
    assert np.all(out[np.abs(g.k) > g.k_keep] == 0)
