"""Gaussian weight, frequency-dependent lift and the vorticity cutoff.

With ``s = 1 + t/eps`` and ``<xi>^2 = 1 + xi^2``:

* weight      ``rho = exp(y^2 / (8 s))``
* lift        ``theta_xi = 1 - exp(-a y^2)`` with ``a = <xi>^2 / (2 s)``
* lift mass   ``c_theta = I_inf[1 - theta_xi] = sqrt(2 pi s) / (2 <xi>)``

All derivatives of the lift are closed form.  Functions broadcast over
numpy arrays; passing ``xi[:, None]`` and ``y[None, :]`` gives a
(mode, y-node) table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erf, erfc


def _s(t, eps):
    return 1.0 + t / eps


def bracket2(xi):
    return 1.0 + np.square(xi)


# -- weight ----------------------------------------------------------------

def rho(y, t, eps):
    return np.exp(np.square(y) / (8.0 * _s(t, eps)))


def rho2(y, t, eps):
    return np.exp(np.square(y) / (4.0 * _s(t, eps)))


def dt_log_rho(y, t, eps):
    s = _s(t, eps)
    return -np.square(y) / (8.0 * eps * s * s)


# -- lift ------------------------------------------------------------------

def _rate(xi, t, eps):
    return bracket2(xi) / (2.0 * _s(t, eps))


def one_minus_theta(xi, y, t, eps):
    return np.exp(-_rate(xi, t, eps) * np.square(y))


def theta(xi, y, t, eps):
    return -np.expm1(-_rate(xi, t, eps) * np.square(y))


def dtheta_dy(xi, y, t, eps):
    a = _rate(xi, t, eps)
    return 2.0 * a * y * np.exp(-a * np.square(y))


def d2theta_dy2(xi, y, t, eps):
    a = _rate(xi, t, eps)
    y2 = np.square(y)
    return (2.0 * a - 4.0 * a * a * y2) * np.exp(-a * y2)


def d3theta_dy3(xi, y, t, eps):
    a = _rate(xi, t, eps)
    y2 = np.square(y)
    return (8.0 * a**3 * y2 * y - 12.0 * a * a * y) * np.exp(-a * y2)


def dtheta_dt(xi, y, t, eps):
    a = _rate(xi, t, eps)
    s = _s(t, eps)
    y2 = np.square(y)
    return -a * y2 * np.exp(-a * y2) / (eps * s)


def d2theta_dtdy(xi, y, t, eps):
    a = _rate(xi, t, eps)
    s = _s(t, eps)
    y2 = np.square(y)
    return 2.0 * a * y * (a * y2 - 1.0) * np.exp(-a * y2) / (eps * s)


def int_one_minus_theta(xi, y, t, eps):
    """Closed-form I_y[1 - theta_xi]."""
    a = _rate(xi, t, eps)
    ra = np.sqrt(a)
    return 0.5 * np.sqrt(np.pi) / ra * erf(ra * y)


def int_theta(xi, y, t, eps):
    """Closed-form I_y[theta_xi] = y - I_y[1 - theta_xi]."""
    return y - int_one_minus_theta(xi, y, t, eps)


def c_theta(xi, t, eps):
    """I_inf[1 - theta_xi] = sqrt(2 pi (1 + t/eps)) / (2 <xi>).

    This is the exact mass of ``1 - theta_xi`` for the lift defined above,
    so the rewritten forcing decays in y.
    """
    return np.sqrt(2.0 * np.pi * _s(t, eps)) / (2.0 * np.sqrt(bracket2(xi)))


def tail_one_minus_theta(xi, y, t, eps):
    """I_inf[1 - theta_xi] - I_y[1 - theta_xi], computed without cancellation."""
    a = _rate(xi, t, eps)
    ra = np.sqrt(a)
    return 0.5 * np.sqrt(np.pi) / ra * erfc(ra * y)


# -- cutoff ----------------------------------------------------------------

CHI_START = 1.0
CHI_END = 6.0


def chi(y):
    u = np.clip((np.asarray(y, dtype=float) - CHI_START) / (CHI_END - CHI_START), 0.0, 1.0)
    return u**3 * (10.0 - 15.0 * u + 6.0 * u * u)


def chi_prime(y):
    y = np.asarray(y, dtype=float)
    u = np.clip((y - CHI_START) / (CHI_END - CHI_START), 0.0, 1.0)
    return 30.0 * u * u * (1.0 - u) ** 2 / (CHI_END - CHI_START)


def chi_second(y):
    y = np.asarray(y, dtype=float)
    u = np.clip((y - CHI_START) / (CHI_END - CHI_START), 0.0, 1.0)
    return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u) / (CHI_END - CHI_START) ** 2


# -- verification suite ----------------------------------------------------

def _trap(f, y):
    return np.trapezoid(f, y) if hasattr(np, "trapezoid") else np.trapz(f, y)


@dataclass
class HardyReport:
    lhs: float
    rhs: float
    satisfied: bool


def hardy_check(y, f, t, eps, df=None, rtol=1e-8) -> HardyReport:
    """Weighted Hardy inequality on a sampled profile.

    Compares ``|rho f|^2 + |y rho f|^2 / (4 s)`` with ``4 s |rho f'|^2``.
    ``df`` defaults to a second-order finite difference of ``f``.
    """
    y = np.asarray(y, dtype=float)
    f = np.asarray(f)
    if df is None:
        df = np.gradient(f, y, edge_order=2)
    s = _s(t, eps)
    r2 = rho2(y, t, eps)
    lhs = _trap(r2 * np.abs(f) ** 2, y) + _trap(r2 * (y * np.abs(f)) ** 2, y) / (4 * s)
    rhs = 4 * s * _trap(r2 * np.abs(df) ** 2, y)
    return HardyReport(float(lhs), float(rhs), bool(lhs <= rhs * (1 + rtol)))


@dataclass
class LiftBounds:
    """Fitted constants K for the three lift estimates at one frequency."""

    xi: float
    K_decay: float   # |(1 - theta) rho| <xi>^{1/2}
    K_dt: float      # eps |rho dt theta| <xi>^{1/2}
    K_dyy: float     # |y rho^2 dyy theta| / <xi>^{1/2}


def lift_bounds(xi, t, eps, y_max=12.0, n_y=4097) -> LiftBounds:
    y = np.linspace(0.0, y_max, n_y)
    b = np.sqrt(np.sqrt(bracket2(xi)))
    r = rho(y, t, eps)
    k1 = np.sqrt(_trap((one_minus_theta(xi, y, t, eps) * r) ** 2, y)) * b
    k2 = eps * np.sqrt(_trap((dtheta_dt(xi, y, t, eps) * r) ** 2, y)) * b
    k3 = np.sqrt(_trap((y * r * r * d2theta_dy2(xi, y, t, eps)) ** 2, y)) / b
    return LiftBounds(float(xi), float(k1), float(k2), float(k3))


def lift_bounds_check(xis, t, eps, drift_tol=0.1, **kw) -> dict:
    """Sweep ``lift_bounds`` over frequencies and flag drift of each K.

    Drift is max/min - 1 of the fitted constant over the sweep.
    """
    rows = [lift_bounds(x, t, eps, **kw) for x in xis]
    report = {"rows": rows}
    for name in ("K_decay", "K_dt", "K_dyy"):
        vals = np.array([getattr(r, name) for r in rows])
        drift = float(vals.max() / vals.min() - 1.0) if vals.min() > 0 else np.inf
        report[name] = {"max": float(vals.max()), "drift": drift,
                        "stable": bool(drift <= drift_tol)}
    return report


def iy_sup_check(y, f, t, eps) -> dict:
    """Check sup |I_y f| <= |rho^{-1}|_{L^2} |rho f|_{L^2} on a sampled profile."""
    y = np.asarray(y, dtype=float)
    f = np.asarray(f)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(y))])
    r = rho(y, t, eps)
    K = np.sqrt(_trap(1.0 / r**2, y))
    bound = K * np.sqrt(_trap((r * np.abs(f)) ** 2, y))
    sup = float(np.max(np.abs(cum)))
    return {"sup": sup, "K": float(K), "bound": float(bound), "satisfied": sup <= bound * (1 + 1e-12)}
