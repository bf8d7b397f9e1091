"""Homogenized lower-deck equation for wbar and its coupling terms.

    d/dt wbar = d2/dy2 wbar - i xi y wbar - N - L - M - B

Every term is quadratic or linear in ``(wbar, A)``.  Writing the lift part
of the velocity as ``Theta_xi(y) = A_xi theta_xi(y)`` and its vertical
velocity as ``V_Theta = -i xi A_xi I_y[theta_xi]``, the quadratic pieces are
ordinary physical-space products:

    N = w w_x + v w_y
    L = w Theta_x + Theta w_x + v Theta_y
    M = V_Theta w_y
    B_quad = Theta Theta_x - A A_x + V_Theta Theta_y

This is the fast path.  The ``*_direct`` functions evaluate the same sums
mode pair by mode pair, with the lift evaluated at each partner frequency,
and serve as the reference.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import spectral as sp
from . import weights as wt
from .benjamin_ono import bo_rhs


@dataclass
class DeckState:
    wbar: np.ndarray
    A: np.ndarray
    t: float
    eps: float


@dataclass
class Switches:
    """Model toggles.  ``coupling=False`` removes every A-dependence of the
    wbar equation and the wbar/lift forcing of the A equation."""

    nonlinear: bool = True
    coupling: bool = True


class Lift:
    """Lift profiles and their derivatives on a (mode, y) table."""

    def __init__(self, grid: sp.Grid, t: float, eps: float):
        xi = grid.xi[:, None]
        y = grid.y[None, :]
        self.theta = wt.theta(xi, y, t, eps)
        self.one_minus = wt.one_minus_theta(xi, y, t, eps)
        self.dy = wt.dtheta_dy(xi, y, t, eps)
        self.dyy = wt.d2theta_dy2(xi, y, t, eps)
        self.dyyy = wt.d3theta_dy3(xi, y, t, eps)
        self.dt = wt.dtheta_dt(xi, y, t, eps)
        self.dtdy = wt.d2theta_dtdy(xi, y, t, eps)
        self.int_theta = wt.int_theta(xi, y, t, eps)
        self.tail = wt.tail_one_minus_theta(xi, y, t, eps)
        self.c = wt.c_theta(grid.xi, t, eps)


def _zero_walls(f: np.ndarray) -> np.ndarray:
    f[:, 0] = 0.0
    f[:, -1] = 0.0
    return f


def vbar(grid: sp.Grid, wbar: np.ndarray) -> np.ndarray:
    """Vertical velocity -i xi I_y[wbar]."""
    return -1j * grid.xi_odd[:, None] * sp.integrate_y(grid, wbar)


# -- fast path -------------------------------------------------------------

class _Physical:
    """Physical-space samples shared by the product terms."""

    def __init__(self, grid: sp.Grid, wbar: np.ndarray, A: np.ndarray | None,
                 lift: Lift | None, derivs: bool = False):
        ixi = 1j * grid.xi_odd[:, None]
        phys = lambda f: sp.to_physical(grid, f)
        self.grid = grid
        self.wy_spec = sp.ddy(grid, wbar)
        self.w = phys(wbar)
        self.wx = phys(ixi * wbar)
        self.wy = phys(self.wy_spec)
        self.v = phys(vbar(grid, wbar))
        if derivs:
            self.wyy = phys(sp.d2dy2(grid, wbar))
            self.wxy = phys(ixi * self.wy_spec)
        self.has_lift = A is not None
        if A is not None:
            a = A[:, None]
            self.T = phys(a * lift.theta)
            self.Tx = phys(ixi * a * lift.theta)
            self.Ty = phys(a * lift.dy)
            self.VT = phys(-ixi * a * lift.int_theta)
            self.a = sp.to_physical(grid, A)[:, None]
            self.ax = sp.to_physical(grid, 1j * grid.xi_odd * A)[:, None]
            if derivs:
                self.Tyy = phys(a * lift.dyy)
                self.Txy = phys(ixi * a * lift.dy)

    def spec(self, f):
        return _zero_walls(sp.from_physical(self.grid, f))


@dataclass
class Terms:
    N: np.ndarray
    L: np.ndarray
    M: np.ndarray
    B: np.ndarray
    dtA: np.ndarray
    extra: dict = field(default_factory=dict)


def compute_terms(grid: sp.Grid, wbar: np.ndarray, A: np.ndarray, t: float, eps: float,
                  switches: Switches = Switches(), lift: Lift | None = None) -> Terms:
    """Evaluate N, L, M, B and dA/dt together, sharing transforms."""
    if lift is None:
        lift = Lift(grid, t, eps)
    nonlinear, coupling = switches.nonlinear, switches.coupling
    dtA = bo_rhs(grid, A, wbar, t, eps, coupling=coupling, nonlinear=nonlinear)
    A_w = A if coupling else np.zeros_like(A)
    zero = grid.zeros()
    if nonlinear:
        ph = _Physical(grid, wbar, A_w, lift)
        N = ph.spec(ph.w * ph.wx + ph.v * ph.wy)
        if coupling:
            L = ph.spec(ph.w * ph.Tx + ph.T * ph.wx + ph.v * ph.Ty)
            M = ph.spec(ph.VT * ph.wy)
            Bq = ph.spec(ph.T * ph.Tx - ph.a * ph.ax + ph.VT * ph.Ty)
        else:
            L, M, Bq = zero, zero.copy(), zero.copy()
    else:
        N, L, M, Bq = zero, zero.copy(), zero.copy(), zero.copy()
    dtA_w = dtA if coupling else np.zeros_like(A)
    B = _B_linear(grid, wbar, A_w, dtA_w, lift) + Bq
    return Terms(N, L, M, _zero_walls(B), dtA)


def _B_linear(grid, wbar, A, dtA, lift: Lift) -> np.ndarray:
    """Rewritten forcing without its quadratic part; each piece decays in y."""
    ixi = 1j * grid.xi_odd[:, None]
    y = grid.y[None, :]
    a = A[:, None]
    out = a * (lift.dt - lift.dyy) - lift.one_minus * dtA[:, None]
    Iw = sp.integrate_y(grid, wbar)
    out = out + ixi * (Iw[:, -1:] - Iw)
    out = out + ixi * a * (-y * lift.one_minus - lift.tail)
    return out


def term_N(grid: sp.Grid, wbar: np.ndarray) -> np.ndarray:
    ph = _Physical(grid, wbar, None, None)
    return ph.spec(ph.w * ph.wx + ph.v * ph.wy)


def term_L(grid, wbar, A, t, eps, method: str = "fft") -> np.ndarray:
    if method == "direct":
        return term_L_direct(grid, wbar, A, t, eps)
    ph = _Physical(grid, wbar, A, Lift(grid, t, eps))
    return ph.spec(ph.w * ph.Tx + ph.T * ph.wx + ph.v * ph.Ty)


def term_M(grid, wbar, A, t, eps, method: str = "fft") -> np.ndarray:
    if method == "direct":
        return term_M_direct(grid, wbar, A, t, eps)
    ph = _Physical(grid, wbar, A, Lift(grid, t, eps))
    return ph.spec(ph.VT * ph.wy)


def term_B(grid, wbar, A, t, eps, switches: Switches = Switches()) -> np.ndarray:
    return compute_terms(grid, wbar, A, t, eps, switches).B


def term_B_original(grid, wbar, A, t, eps, nonlinear: bool = True) -> np.ndarray:
    """Forcing in its original (non-decaying) arrangement.

    ``A(dt - dyy)theta + (theta - 1) dA/dt + (dA/dt + i xi |xi| A)
    + i xi (A (y theta - I_y theta) - I_y wbar) + quadratic``, with dA/dt
    taken from the Benjamin-Ono right-hand side.  Used only as an
    independent check of the rewritten form.
    """
    lift = Lift(grid, t, eps)
    ixi = 1j * grid.xi_odd[:, None]
    y = grid.y[None, :]
    a = A[:, None]
    dtA = bo_rhs(grid, A, wbar, t, eps, nonlinear=nonlinear)[:, None]
    out = a * (lift.dt - lift.dyy) + (lift.theta - 1.0) * dtA
    out = out + dtA + ixi * np.abs(grid.xi)[:, None] * a
    out = out + ixi * (a * (y * lift.theta - lift.int_theta) - sp.integrate_y(grid, wbar))
    if nonlinear:
        T = a * lift.theta
        out = out + sp.convolve(grid, T, ixi * T)
        out = out + sp.convolve(grid, -ixi * a * lift.int_theta, a * lift.dy)
    return _zero_walls(out)


def prandtl_rhs(grid: sp.Grid, state: DeckState, switches: Switches = Switches(),
                terms: Terms | None = None) -> np.ndarray:
    """d/dt wbar using the compact second derivative; wall rows are zero."""
    if terms is None:
        terms = compute_terms(grid, state.wbar, state.A, state.t, state.eps, switches)
    y = grid.y[None, :]
    out = sp.laplacian_compact(grid, state.wbar)
    out = out - 1j * grid.xi_odd[:, None] * y * state.wbar
    out = out - terms.N - terms.L - terms.M - terms.B
    return _zero_walls(out)


# -- y-differentiated family -----------------------------------------------

def dy_terms(grid: sp.Grid, wbar: np.ndarray, A: np.ndarray, t: float, eps: float,
             switches: Switches = Switches(), lift: Lift | None = None) -> dict:
    """d/dy of N, L, M, B after the symmetric cancellations.

    The wbar-derivatives are second-order finite differences, the lift
    derivatives are exact.
    """
    if lift is None:
        lift = Lift(grid, t, eps)
    coupling = switches.coupling
    A_w = A if coupling else np.zeros_like(A)
    ph = _Physical(grid, wbar, A_w, lift, derivs=True)
    zero = grid.zeros()
    out = {}
    if switches.nonlinear:
        out["dyN"] = ph.spec(ph.w * ph.wxy + ph.v * ph.wyy)
        if coupling:
            out["dyL"] = ph.spec(ph.wy * ph.Tx + ph.w * ph.Txy + ph.T * ph.wxy + ph.v * ph.Tyy)
            out["dyM"] = ph.spec(-ph.Tx * ph.wy + ph.VT * ph.wyy)
            quad = ph.spec(ph.T * ph.Txy + ph.VT * ph.Tyy)
        else:
            out["dyL"], out["dyM"], quad = zero, zero.copy(), zero.copy()
    else:
        out["dyN"], out["dyL"], out["dyM"], quad = zero, zero.copy(), zero.copy(), zero.copy()
    dtA = bo_rhs(grid, A, wbar, t, eps, coupling=coupling, nonlinear=switches.nonlinear)
    if not coupling:
        dtA = np.zeros_like(A)
    ixi = 1j * grid.xi_odd[:, None]
    a = A_w[:, None]
    y = grid.y[None, :]
    lin = a * (lift.dtdy - lift.dyyy) + lift.dy * dtA[:, None]
    lin = lin - ixi * wbar + ixi * a * y * lift.dy
    out["dyB"] = _zero_walls(lin + quad)
    return out


# -- direct mode sums (reference) ------------------------------------------

def _pairs(grid: sp.Grid):
    """Yield (output index, partner indices eta, complementary indices)."""
    n = grid.n_modes
    kk = grid.k.astype(int)
    K = grid.k_keep
    for i in range(n):
        if abs(kk[i]) > K:
            continue
        m = np.array([j for j in range(n) if abs(kk[j]) <= K and abs(kk[i] - kk[j]) <= K],
                     dtype=int)
        rest = (kk[i] - kk[m]) % n
        yield i, m, rest


def term_N_direct(grid: sp.Grid, wbar: np.ndarray) -> np.ndarray:
    xi = grid.xi_odd
    Iw = sp.integrate_y(grid, wbar)
    dw = sp.ddy(grid, wbar)
    out = grid.zeros()
    for i, m, rest in _pairs(grid):
        s = wbar[m] * (xi[rest][:, None] * wbar[rest]) - xi[m][:, None] * Iw[m] * dw[rest]
        out[i] = 1j * s.sum(axis=0)
    return _zero_walls(out * grid.conv_weight)


def term_L_direct(grid, wbar, A, t, eps) -> np.ndarray:
    xi = grid.xi_odd
    y = grid.y[None, :]
    Iw = sp.integrate_y(grid, wbar)
    out = grid.zeros()
    for i, m, rest in _pairs(grid):
        # lift evaluated at each partner frequency
        th_r = wt.theta(grid.xi[rest][:, None], y, t, eps)
        th_m = wt.theta(grid.xi[m][:, None], y, t, eps)
        dth_r = wt.dtheta_dy(grid.xi[rest][:, None], y, t, eps)
        s = (wbar[m] * (xi[rest] * A[rest])[:, None] * th_r
             + (A[m][:, None] * th_m) * xi[rest][:, None] * wbar[rest]
             - xi[m][:, None] * Iw[m] * A[rest][:, None] * dth_r)
        out[i] = 1j * s.sum(axis=0)
    return _zero_walls(out * grid.conv_weight)


def term_M_direct(grid, wbar, A, t, eps) -> np.ndarray:
    xi = grid.xi_odd
    y = grid.y[None, :]
    dw = sp.ddy(grid, wbar)
    out = grid.zeros()
    for i, m, rest in _pairs(grid):
        ith = wt.int_theta(grid.xi[m][:, None], y, t, eps)
        s = (xi[m] * A[m])[:, None] * ith * dw[rest]
        out[i] = -1j * s.sum(axis=0)
    return _zero_walls(out * grid.conv_weight)


def term_Bquad_direct(grid, A, t, eps) -> np.ndarray:
    """Quadratic part of the rewritten forcing by direct sums."""
    xi = grid.xi_odd
    y = grid.y[None, :]
    out = grid.zeros()
    for i, m, rest in _pairs(grid):
        th_m = wt.theta(grid.xi[m][:, None], y, t, eps)
        th_r = wt.theta(grid.xi[rest][:, None], y, t, eps)
        ith_m = wt.int_theta(grid.xi[m][:, None], y, t, eps)
        dth_r = wt.dtheta_dy(grid.xi[rest][:, None], y, t, eps)
        pair = (A[m] * A[rest])[:, None]
        s = xi[rest][:, None] * pair * (th_m * th_r - 1.0) - xi[m][:, None] * pair * ith_m * dth_r
        out[i] = 1j * s.sum(axis=0)
    return _zero_walls(out * grid.conv_weight)
