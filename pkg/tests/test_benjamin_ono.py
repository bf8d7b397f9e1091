import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tripledeck import spectral as sp
from tripledeck import weights as wt
from tripledeck.benjamin_ono import (bo_invariants, bo_linear, bo_nonlinear, bo_rhs,
                                     bo_soliton, travelling_residual)
from tripledeck.errors import ConfigurationError
from tripledeck.prandtl import Switches
from tripledeck.selftest import random_state
from tripledeck.stepper import Integrator, ModelParams, StepperConfig

EPS = 1.0 / 64


def literal_rhs(grid, A, wbar, t, eps):
    """Every term of the forced equation by explicit loops over integer modes."""
    n, K = grid.n_modes, grid.k_keep
    k = grid.k.astype(int)
    xi = lambda m: m / grid.L_x if abs(m) < n // 2 else 0.0
    out = np.zeros(n, complex)
    for i in range(n):
        ki = k[i]
        x = xi(ki)
        br = 1.0 + (ki / grid.L_x) ** 2
        c = np.sqrt(2 * np.pi * (1 + t / eps)) / (2 * np.sqrt(br))
        col = wbar[i]
        iinf = grid.dy * (col.sum() - 0.5 * (col[0] + col[-1]))
        out[i] = -1j * x * c * A[i] + 1j * x * iinf - 1j * x * abs(ki / grid.L_x) * A[i]
        if abs(ki) > K:
            continue
        acc = 0j
        for m in range(-K, K + 1):
            rest = ki - m
            if abs(rest) <= K:
                acc += A[m % n] * 1j * xi(rest) * A[rest % n]
        out[i] -= acc * grid.conv_weight
    return out


def test_zero():
    g = sp.Grid(32, 20.0, 32, 12.0)
    assert np.all(bo_rhs(g, g.zeros_surface(), g.zeros(), 0.0, EPS) == 0)
    inv = bo_invariants(g, g.zeros_surface())
    assert inv == {"mean": 0.0, "l2_mass": 0.0}


def test_single_mode():
    g = sp.Grid(32, 20.0, 32, 12.0)
    A = g.zeros_surface()
    A[3] = 0.7 - 0.2j
    A[-3] = np.conj(A[3])
    lin = bo_linear(g, A, g.zeros(), 0.01, EPS)
    x = g.xi[3]
    assert lin[3] == pytest.approx(-1j * x * (wt.c_theta(x, 0.01, EPS) + abs(x)) * A[3], rel=1e-15)
    nl = bo_nonlinear(g, A)
    support = np.flatnonzero(np.abs(nl) > 1e-15)
    assert set(g.k[support].astype(int)) <= {-6, 6, 0}


def test_matches_literal_sums(rng):
    g = sp.Grid(32, 20.0, 48, 12.0)
    w, A = random_state(g, rng)
    got = bo_rhs(g, A, w, 0.004, EPS)
    assert np.max(np.abs(got - literal_rhs(g, A, w, 0.004, EPS))) < 1e-12


@pytest.mark.parametrize("lam", [2.0, -1.0])
def test_quadratic_decomposition(rng, lam):
    g = sp.Grid(32, 20.0, 32, 12.0)
    _, A = random_state(g, rng)
    full = bo_rhs(g, lam * A, None, 0.0, EPS)
    lin = bo_linear(g, A, None, 0.0, EPS)
    nl = bo_nonlinear(g, A)
    assert np.max(np.abs(full - lam * lin + lam**2 * nl)) < 1e-13


def test_forced_reduces_to_unforced(rng):
    g = sp.Grid(32, 20.0, 32, 12.0)
    _, A = random_state(g, rng)
    a = bo_rhs(g, A, g.zeros(), 0.0, EPS, coupling=False)
    xi = g.xi_odd
    b = -1j * xi * np.abs(g.xi) * A - bo_nonlinear(g, A)
    assert np.array_equal(a, b)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_mean_untouched_and_hermitian(seed):
    g = sp.Grid(64, 20.0, 32, 12.0)
    w, A = random_state(g, np.random.default_rng(seed))
    rhs = bo_rhs(g, A, w, 0.0, EPS, coupling=False)
    assert abs(rhs[0]) < 1e-14 * np.max(np.abs(A)) ** 2
    assert sp.hermitian_defect(bo_rhs(g, A, w, 0.0, EPS)) < 1e-13


def test_nonlinear_skew_in_l2(rng):
    g = sp.Grid(64, 20.0, 16, 8.0)
    _, A = random_state(g, rng)
    A = sp.dealias(g, A)
    # <A, (A A_x)^> vanishes, so the quadratic term conserves mass
    assert abs(np.vdot(A, bo_nonlinear(g, A)).real) < 1e-12 * np.sum(np.abs(A)) ** 3


@pytest.fixture(scope="module")
def soliton_grid():
    return sp.Grid(512, 40.0, 16, 8.0)


def test_soliton_even_and_residual(soliton_grid):
    g = soliton_grid
    for x0 in (0.0, 3.0):
        sol = bo_soliton(g, 0.3, x0=x0)
        centred = np.exp(1j * g.xi_odd * x0) * sol.spectrum
        assert np.max(np.abs(centred.imag)) < 1e-12
        assert travelling_residual(g, sol.spectrum, sol.speed) < 1e-6
        assert min(sol.residuals.values()) < 1e-6 < max(sol.residuals.values())


def test_soliton_rejects_short_torus():
    with pytest.raises(ConfigurationError):
        bo_soliton(sp.Grid(64, 1.0, 16, 8.0), 0.01)
    with pytest.raises(ConfigurationError):
        bo_soliton(sp.Grid(64, 20.0, 16, 8.0), -1.0)


def _evolve(grid, A, t_end=0.05):
    model = ModelParams(switches=Switches(True, False))
    cfg = StepperConfig(dt=1e-3, t_end=t_end, bo_only=True, track_radius=False)
    it = Integrator(grid, model, cfg)
    return it.run_to_end(it.start(grid.zeros(), A, 1.0)).run.state.A


def test_translation_equivariance(soliton_grid):
    g = soliton_grid
    shift = 1.37
    a = _evolve(g, sp.dealias(g, bo_soliton(g, 0.3).spectrum))
    b = _evolve(g, sp.dealias(g, bo_soliton(g, 0.3, x0=shift).spectrum))
    phase = np.exp(-1j * g.xi_odd * shift)
    assert np.max(np.abs(b - phase * a)) < 1e-10 * np.max(np.abs(a))


def test_unforced_invariants(soliton_grid):
    g = soliton_grid
    A0 = sp.dealias(g, bo_soliton(g, 0.3).spectrum)
    A1 = _evolve(g, A0, t_end=1.0)
    i0, i1 = bo_invariants(g, A0), bo_invariants(g, A1)
    assert abs(i1["mean"] - i0["mean"]) < 1e-13 * abs(A0).max()
    assert abs(i1["l2_mass"] - i0["l2_mass"]) < 1e-8 * i0["l2_mass"]
