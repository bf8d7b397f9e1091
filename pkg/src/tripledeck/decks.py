"""Blasius base flow and the three-deck reconstruction of physical fields.

Scalings near the trailing edge ``(x, y) = (1, 0)`` at viscosity ``nu``:

    X = (x - 1) / nu^{3/8}     T = t / nu^{1/4}
    Ybar = y / nu^{1/2}   (main)   Y = y / nu^{5/8}   (lower)   Ytil = y / nu^{3/8}   (upper)

Main deck:  u = U_B(Ybar) + nu^{1/8} A U_B'(Ybar), v = -nu^{1/4} A_X U_B, p = nu^{1/4} P
Lower deck: u = nu^{1/8} U, v = nu^{3/8} V, p = nu^{1/4} P with U = Y + wbar + theta A
Upper deck: u = 1 + nu^{1/4} u2, v = nu^{1/4} v2, p = nu^{1/4} p2

``U_B(Ybar) = f'(Ybar / f''(0))`` so that ``U_B'(0) = 1``.  All composite
fields are leading order only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import spectral as sp
from . import weights as wt
from .errors import ConfigurationError
from .prandtl import DeckState


# -- Blasius ---------------------------------------------------------------

def _rk4(s: float, eta_max: float, h: float) -> np.ndarray:
    """Integrate f''' = -f f'' from (0, 0, s); returns (n, 3) samples of f, f', f''."""
    n = int(round(eta_max / h))
    h = eta_max / n
    out = np.empty((n + 1, 3))
    u = np.array([0.0, 0.0, s])

    def rhs(v):
        return np.array([v[1], v[2], -v[0] * v[2]])

    out[0] = u
    for i in range(n):
        k1 = rhs(u)
        k2 = rhs(u + 0.5 * h * k1)
        k3 = rhs(u + 0.5 * h * k2)
        k4 = rhs(u + h * k3)
        u = u + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = u
    return out


@dataclass
class BlasiusProfile:
    eta: np.ndarray
    f: np.ndarray
    fp: np.ndarray
    fpp: np.ndarray
    fpp0: float

    def __post_init__(self):
        self._fp = CubicHermiteSpline(self.eta, self.fp, self.fpp)
        self._fpp = CubicHermiteSpline(self.eta, self.fpp, -self.f * self.fpp)

    def U_B(self, ybar):
        """Normalized main-deck profile f'(ybar / f''(0)), equal to 1 past the grid."""
        eta = np.asarray(ybar, dtype=float) / self.fpp0
        return np.where(eta < self.eta[-1], self._fp(np.minimum(eta, self.eta[-1])), 1.0)

    def dU_B(self, ybar):
        eta = np.asarray(ybar, dtype=float) / self.fpp0
        return np.where(eta < self.eta[-1], self._fpp(np.minimum(eta, self.eta[-1])) / self.fpp0, 0.0)

    @property
    def displacement(self) -> float:
        """Limit of eta - f(eta), read off at the end of the grid."""
        return float(self.eta[-1] - self.f[-1])


def blasius_solve(eta_max: float = 12.0, tol: float = 1e-12, h: float = 0.01,
                  bracket: tuple = (0.4, 0.5)) -> BlasiusProfile:
    """Shooting on f''(0) with bisection until f'(eta_max) = 1 within ``tol``."""
    if eta_max < 10:
        raise ConfigurationError("eta_max must be at least 10")
    miss = lambda s: _rk4(s, eta_max, h)[-1, 1] - 1.0
    lo, hi = bracket
    m_lo, m_hi = miss(lo), miss(hi)
    if m_lo * m_hi > 0:
        raise ConfigurationError(f"shooting bracket {bracket} does not straddle f'(inf) = 1")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        m = miss(mid)
        if abs(m) < tol or hi - lo < 1e-15:
            break
        if (m < 0) == (m_lo < 0):
            lo, m_lo = mid, m
        else:
            hi = mid
    sol = _rk4(mid, eta_max, h)
    eta = np.linspace(0.0, eta_max, sol.shape[0])
    if np.any(np.diff(sol[:, 1]) < -1e-14):
        raise ConfigurationError("computed f' is not monotone")
    return BlasiusProfile(eta, sol[:, 0], sol[:, 1], sol[:, 2], float(mid))


# -- pressure-displacement -------------------------------------------------

def pressure_from_displacement(grid: sp.Grid, A: np.ndarray) -> np.ndarray:
    """P_xi = |xi| A_xi."""
    return np.abs(grid.xi) * A


def pressure_pv_quadrature(x: np.ndarray, dA, L_x: float, n_quad: int = 4096) -> np.ndarray:
    """Periodic principal-value integral (1/(2 pi L)) p.v. int A'(s) cot((x - s)/(2L)) ds.

    ``dA`` is a callable giving the x-derivative of the displacement.  The
    singularity is removed by subtracting ``A'(x)`` (the cotangent has zero
    principal value over a period); the remainder is smooth and periodic, so
    the midpoint rule on ``n_quad`` nodes offset from ``x`` converges fast.
    """
    period = 2 * np.pi * L_x
    x = np.atleast_1d(np.asarray(x, dtype=float))
    offs = (np.arange(n_quad) + 0.5) * period / n_quad - 0.5 * period
    out = np.empty_like(x)
    for i, xi in enumerate(x):
        s = xi + offs
        integrand = (dA(s) - dA(np.array([xi]))[0]) / np.tan(-offs / (2 * L_x))
        out[i] = integrand.sum() * (period / n_quad) / period
    return out


# -- reconstruction ----------------------------------------------------------

@dataclass
class DeckComposite:
    nu: float
    X: np.ndarray
    x: np.ndarray
    T: float
    t: float
    lower: dict      # U, V, P on (X, Y) plus the physical u, v, p and y
    main: dict       # on (X, Ybar)
    upper: dict      # on (X, Ytil)
    fpp0: float


def reconstruct(grid: sp.Grid, lower: DeckState, blasius: BlasiusProfile, nu: float,
                ybar: np.ndarray | None = None, ytil: np.ndarray | None = None) -> DeckComposite:
    if not 0.0 < nu < 1.0:
        raise ConfigurationError("nu must lie in (0, 1)")
    if ybar is None:
        ybar = np.linspace(0.0, blasius.eta[-1] * blasius.fpp0, 241)
    if ytil is None:
        ytil = np.linspace(0.0, 10.0, 101)
    xi = grid.xi_odd
    A = lower.A
    Y = grid.y
    X = grid.x
    th = wt.theta(grid.xi[:, None], Y[None, :], lower.t, lower.eps)
    corr = lower.wbar + th * A[:, None]
    U = Y[None, :] + sp.inverse_transform(grid, corr)
    V = sp.inverse_transform(grid, -1j * xi[:, None] * sp.integrate_y(grid, corr))
    P_spec = pressure_from_displacement(grid, A)
    P = sp.inverse_transform(grid, P_spec)
    Ax = sp.inverse_transform(grid, 1j * xi * A)
    A_phys = sp.inverse_transform(grid, A)

    q8, q4 = nu ** 0.125, nu ** 0.25
    lower_d = {"Y": Y, "y": nu ** 0.625 * Y, "U": U, "V": V, "P": P,
               "u": q8 * U, "v": nu ** 0.375 * V, "p": q4 * np.broadcast_to(P[:, None], U.shape)}

    UB, dUB = blasius.U_B(ybar), blasius.dU_B(ybar)
    u1 = A_phys[:, None] * dUB[None, :]
    v1 = -Ax[:, None] * UB[None, :]
    main_d = {"Ybar": ybar, "y": nu ** 0.5 * ybar, "u1": u1, "v1": v1, "p1": P,
              "u": UB[None, :] + q8 * u1, "v": q4 * v1,
              "p": q4 * np.broadcast_to(P[:, None], u1.shape)}

    decay = np.exp(-np.abs(grid.xi)[:, None] * ytil[None, :])
    v2 = sp.inverse_transform(grid, -1j * xi[:, None] * A[:, None] * decay)
    p2 = sp.inverse_transform(grid, np.abs(grid.xi)[:, None] * A[:, None] * decay)
    upper_d = {"Ytil": ytil, "y": nu ** 0.375 * ytil, "u2": -p2, "v2": v2, "p2": p2,
               "u": 1.0 + q4 * (-p2), "v": q4 * v2, "p": q4 * p2,
               "_spec": (A, decay)}
    return DeckComposite(nu, X, 1.0 + nu ** 0.375 * X, lower.t, q4 * lower.t,
                         lower_d, main_d, upper_d, blasius.fpp0)


def cauchy_riemann_residual(grid: sp.Grid, comp: DeckComposite) -> float:
    """max |dX v2 + dYtil p2| + |dX p2 - dYtil v2|, X spectrally and Ytil by its symbol."""
    A, decay = comp.upper["_spec"]
    xi = grid.xi_odd[:, None]
    ab = np.abs(grid.xi)[:, None]
    v2 = -1j * xi * A[:, None] * decay
    p2 = ab * A[:, None] * decay
    r1 = 1j * xi * v2 + (-ab) * p2
    r2 = 1j * xi * p2 - (-ab) * v2
    return float(np.max(np.abs(sp.inverse_transform(grid, r1)))
                 + np.max(np.abs(sp.inverse_transform(grid, r2))))


def matching_error(grid: sp.Grid, lower: DeckState, blasius: BlasiusProfile, nu: float,
                   Y_match: float = 1.0) -> float:
    """max over X of |u_lower(X, Y_match) - u_main(X, Ybar = nu^{1/8} Y_match)|."""
    j = int(np.argmin(np.abs(grid.y - Y_match)))
    Ym = grid.y[j]
    comp = reconstruct(grid, lower, blasius, nu, ybar=np.array([nu ** 0.125 * Ym]),
                       ytil=np.array([0.0]))
    return float(np.max(np.abs(comp.lower["u"][:, j] - comp.main["u"][:, 0])))


def matching_slope(grid, lower, blasius, nus=(1e-2, 1e-3, 1e-4), Y_match=1.0) -> tuple:
    """Least-squares slope of log error against log nu, and the errors."""
    errs = np.array([matching_error(grid, lower, blasius, nu, Y_match) for nu in nus])
    slope = np.polyfit(np.log(nus), np.log(errs), 1)[0]
    return float(slope), errs
