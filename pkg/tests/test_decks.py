import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from tripledeck import spectral as sp
from tripledeck.decks import (blasius_solve, cauchy_riemann_residual, matching_slope,
                              pressure_from_displacement, pressure_pv_quadrature, reconstruct)
from tripledeck.errors import ConfigurationError
from tripledeck.presets import deck_state
from tripledeck.prandtl import DeckState

FPP0 = 0.469599988367   # frozen from an RK4 shooting run at h = 0.01


@pytest.fixture(scope="module")
def blasius():
    return blasius_solve()


def shooting_oracle():
    """Independent adaptive-integrator shooting for f''' + f f'' = 0."""
    def miss(s):
        sol = solve_ivp(lambda _, v: [v[1], v[2], -v[0] * v[2]], (0, 12), [0, 0, s],
                        rtol=1e-12, atol=1e-14, method="DOP853")
        return sol.y[1, -1] - 1.0
    return brentq(miss, 0.4, 0.5, xtol=1e-14)


def test_blasius_wall_curvature(blasius):
    assert blasius.fpp0 == pytest.approx(FPP0, abs=1e-10)
    assert blasius.fpp0 == pytest.approx(shooting_oracle(), abs=1e-9)
    assert np.all(np.diff(blasius.fp) >= 0)
    assert blasius.displacement == pytest.approx(1.2168, abs=1e-3)


def test_blasius_domain_independent(blasius):
    assert abs(blasius_solve(eta_max=24.0).fpp0 - blasius.fpp0) < 1e-8


def test_blasius_normalization(blasius):
    assert blasius.dU_B(0.0) == pytest.approx(1.0, rel=1e-12)
    assert blasius.U_B(0.0) == 0.0
    assert blasius.U_B(100.0) == 1.0
    with pytest.raises(ConfigurationError):
        blasius_solve(bracket=(0.5, 0.6))
    with pytest.raises(ConfigurationError):
        blasius_solve(eta_max=5.0)


def test_pressure_symbol():
    g = sp.Grid(64, 20.0, 16, 8.0)
    k = 3 / g.L_x
    A = sp.forward_transform(g, np.cos(k * g.x))
    P = sp.inverse_transform(g, pressure_from_displacement(g, A))
    assert np.max(np.abs(P - k * np.cos(k * g.x))) < 1e-13
    const = sp.forward_transform(g, np.full(64, 2.5))
    assert np.max(np.abs(pressure_from_displacement(g, const))) == 0.0


def test_pressure_principal_value():
    g = sp.Grid(64, 20.0, 16, 8.0)
    L = g.L_x
    coef = {1: 0.4, 2: -0.3, 5: 0.1}
    A = sum(c * np.cos(m * g.x / L + 0.3 * m) for m, c in coef.items())
    dA = lambda s: sum(-c * m / L * np.sin(m * s / L + 0.3 * m) for m, c in coef.items())
    spectral = sp.inverse_transform(g, pressure_from_displacement(g, sp.forward_transform(g, A)))
    pv = pressure_pv_quadrature(g.x[::4], dA, L)
    assert np.max(np.abs(pv - spectral[::4])) < 1e-4


def test_reconstruct_base_flow(blasius):
    g = sp.Grid(32, 20.0, 64, 12.0)
    comp = reconstruct(g, DeckState(g.zeros(), g.zeros_surface(), 0.0, 1 / 64), blasius, 1e-3)
    assert np.allclose(comp.lower["U"], g.y[None, :], atol=1e-15)
    assert np.allclose(comp.main["u"], blasius.U_B(comp.main["Ybar"])[None, :], atol=1e-15)
    assert np.all(comp.upper["u"] == 1.0)
    with pytest.raises(ConfigurationError):
        reconstruct(g, DeckState(g.zeros(), g.zeros_surface(), 0.0, 1 / 64), blasius, 2.0)


def test_no_slip_and_harmonic_upper_deck(blasius):
    g = sp.Grid(64, 20.0, 128, 12.0)
    w, A = deck_state(g)
    ytil = np.linspace(0, 4, 4001)
    comp = reconstruct(g, DeckState(w, A, 0.0, 1 / 64), blasius, 1e-3, ytil=ytil)
    assert np.all(comp.lower["U"][:, 0] == 0.0) and np.all(comp.lower["V"][:, 0] == 0.0)
    assert cauchy_riemann_residual(g, comp) < 1e-8
    # finite-difference check of the same pair on the sampled fields
    v2, p2 = comp.upper["v2"], comp.upper["p2"]
    dX = lambda f: sp.inverse_transform(g, 1j * g.xi_odd[:, None] * sp.forward_transform(g, f))
    dY = lambda f: np.gradient(f, ytil, axis=1)
    r1 = dX(v2) + dY(p2)
    r2 = dX(p2) - dY(v2)
    scale = np.max(np.abs(p2))
    assert np.max(np.abs(r1[:, 1:-1])) < 1e-5 * scale and np.max(np.abs(r2[:, 1:-1])) < 1e-5 * scale


def test_matching_order(blasius):
    g = sp.Grid(64, 20.0, 256, 12.0)
    w, A = deck_state(g)
    slope, errs = matching_slope(g, DeckState(w, A, 0.0, 1 / 64), blasius)
    assert np.all(np.diff(errs) < 0)
    assert abs(slope - 0.125) <= 0.15
