"""Analytic norms, composite energies, the radius ODE and parameter selection.

Squared norms are sums over modes of

    dxi * exp(2 tau |xi|) <xi>^{2r} * sum_j trap_j rho_j^2 |f_{xi}(y_j)|^2

with ``dxi = 1 / L_x``.  The exponential weight is applied in log form so
large radii do not overflow before the mode sum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import spectral as sp
from . import weights as wt
from .errors import CertificationError, RadiusExhaustedError


@dataclass
class NormParams:
    tau: float
    r: float = 2.5
    delta: float = 4.364357804719848
    eps: float = 1.0 / 64

    def __post_init__(self):
        if self.r <= 2:
            raise ValueError("r must exceed 2")
        if self.delta <= 1:
            raise ValueError("delta must exceed 1")
        if self.tau < 0:
            raise ValueError("tau must be nonnegative")


def log_mode_weight(grid: sp.Grid, tau: float, r: float) -> np.ndarray:
    return 2.0 * tau * np.abs(grid.xi) + r * np.log1p(grid.xi**2)


def _weighted_total(grid: sp.Grid, q: np.ndarray, tau: float, r: float) -> float:
    """sum_k dxi * exp(logw_k) * q_k without overflowing the exponential."""
    logw = log_mode_weight(grid, tau, r)
    top = float(logw.max())
    if top < 600.0:
        return float(np.dot(q, np.exp(logw)) * grid.dxi)
    scaled = float(np.dot(q, np.exp(logw - top)) * grid.dxi)
    if scaled == 0.0:
        return 0.0
    return math.exp(top + math.log(scaled)) if top + math.log(scaled) < 709 else math.inf


def _profile_sq(grid: sp.Grid, f: np.ndarray, t: float, eps: float,
                y_weight: np.ndarray | None = None) -> np.ndarray:
    """Per-mode sum_j trap_j rho^2 |y_weight f|^2."""
    w = grid.trap * wt.rho2(grid.y, t, eps)
    if y_weight is not None:
        w = w * np.square(y_weight)
    return (f.real**2 + f.imag**2) @ w


def _symbol_sq(grid: sp.Grid, multiplier: str | None) -> np.ndarray | float:
    if multiplier is None:
        return 1.0
    if multiplier == "half_abs":      # |xi|^{1/2}
        return np.abs(grid.xi)
    if multiplier == "half_bracket":  # <xi>^{1/2}
        return np.sqrt(1.0 + grid.xi**2)
    raise ValueError(f"unknown multiplier {multiplier!r}")


def sq_norm_tau_r(grid, f, tau, r, t, eps, y_weight=None, multiplier=None) -> float:
    q = _profile_sq(grid, f, t, eps, y_weight) * _symbol_sq(grid, multiplier)
    return _weighted_total(grid, q, tau, r)


def norm_tau_r(grid: sp.Grid, f: np.ndarray, tau: float, r: float, t: float, eps: float,
               y_weight: np.ndarray | None = None, multiplier: str | None = None) -> float:
    """Weighted analytic norm of a (mode, y) field.

    ``y_weight`` multiplies the profile pointwise (used for chi and y);
    ``multiplier`` inserts ``|xi|^{1/2}`` ("half_abs") or ``<xi>^{1/2}``
    ("half_bracket").
    """
    return math.sqrt(sq_norm_tau_r(grid, f, tau, r, t, eps, y_weight, multiplier))


def sq_norm_tilde(grid, g, tau, r, multiplier=None) -> float:
    q = (g.real**2 + g.imag**2) * _symbol_sq(grid, multiplier)
    return _weighted_total(grid, q, tau, r)


def norm_tilde(grid: sp.Grid, g: np.ndarray, tau: float, r: float,
               multiplier: str | None = None) -> float:
    """Analytic norm of a surface spectrum (no y-integral, no weight)."""
    return math.sqrt(sq_norm_tilde(grid, g, tau, r, multiplier))


def top_third_fraction(grid: sp.Grid, q: np.ndarray, tau: float, r: float) -> float:
    """Share of a weighted squared norm carried by the top third of the retained band."""
    logw = log_mode_weight(grid, tau, r)
    w = q * np.exp(logw - logw.max())
    total = w.sum()
    if total == 0:
        return 0.0
    top = np.abs(grid.k) > 2 * grid.k_keep / 3
    return float(w[top].sum() / total)


def resolution_flag(grid, wbar, A, tau, r, t, eps, threshold=0.01) -> bool:
    """True when the radius is under-resolved (top third above ``threshold``)."""
    fw = top_third_fraction(grid, _profile_sq(grid, wbar, t, eps), tau, r)
    fa = top_third_fraction(grid, np.abs(A) ** 2, tau, r)
    return max(fw, fa) > threshold


# -- composite norms -------------------------------------------------------

def composite_norms(grid: sp.Grid, wbar: np.ndarray, A: np.ndarray, t: float,
                    p: NormParams, parts: bool = False) -> dict:
    """X, Y, Z and H; with ``parts=True`` also the eight constituents."""
    tau, r, eps = p.tau, p.r, p.eps
    chi = wt.chi(grid.y)
    y = grid.y
    wy = sp.ddy(grid, wbar)
    wyy = sp.d2dy2(grid, wbar)
    n = lambda f, rr, **kw: norm_tau_r(grid, f, tau, rr, t, eps, **kw)
    c = {
        "w": n(wbar, r),
        "chi_wy": n(wy, r - 0.5, y_weight=chi),
        "A": norm_tilde(grid, A, tau, r),
        "w_half": n(wbar, r, multiplier="half_abs"),
        "chi_wy_half": n(wy, r - 0.5, y_weight=chi, multiplier="half_abs"),
        "A_half": norm_tilde(grid, A, tau, r, multiplier="half_abs"),
        "wy": n(wy, r),
        "chi_wyy": n(wyy, r - 0.5, y_weight=chi),
        "y_w": n(wbar, r, y_weight=y),
        "y_chi_wy": n(wy, r - 0.5, y_weight=y * chi),
    }
    inv = 1.0 / p.delta
    out = {
        "X": c["w"] + inv * c["chi_wy"] + c["A"],
        "Y": c["w_half"] + inv * c["chi_wy_half"] + c["A_half"],
        "Z": c["wy"] + inv * c["chi_wyy"],
        "H": c["y_w"] + inv * c["y_chi_wy"],
    }
    if parts:
        out["parts"] = c
    return out


def initial_energy(grid, wbar, A, tau0, r, delta, eps) -> float:
    """E0: the squared X norm at radius 10 tau0 and t = 0."""
    p = NormParams(10.0 * tau0, r, delta, eps)
    return composite_norms(grid, wbar, A, 0.0, p)["X"] ** 2


def total_energy(t: np.ndarray, X, Y, Z, H, eps: float) -> float:
    """sup X^2 + int Y^2 + int Z^2 / 16 + int H^2 / (64 eps), trapezoid in time."""
    t = np.asarray(t, dtype=float)
    X, Y, Z, H = (np.asarray(v, dtype=float) for v in (X, Y, Z, H))
    integrand = Y**2 + Z**2 / 16.0 + H**2 / (64.0 * eps)
    integral = float(np.sum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(t))) if t.size > 1 else 0.0
    return float(np.max(X**2)) + integral


def gammas(X: float, Z: float, H: float, eps: float, delta: float,
           C1: float = 1.0, C2: float = 1.0) -> tuple[float, float]:
    core = 1.0 / eps + Z / 4.0 + X + delta * H
    return C1 * (H * H + core), C2 * core


def advance_tau(tau: float, gamma1: float, dt: float) -> float:
    new = tau - dt * (gamma1 + 1.0)
    if new <= 0:
        raise RadiusExhaustedError(f"analyticity radius exhausted (tau -> {new:.3e})")
    return new


# -- parameter selection ---------------------------------------------------

@dataclass
class CertifiedParams:
    delta: float
    eps: float
    T_star: float


def select_delta(C0_tilde: float = 1.0) -> float:
    """Smallest delta with 1/100 + C0_tilde / delta^2 <= 1/16."""
    return math.sqrt(C0_tilde / (1.0 / 16 - 1.0 / 100))


def select_eps(E0: float, tau0: float, C1: float = 1.0) -> float:
    return min(1.0 / 64, tau0 / (12.0 * C1 * E0))


def horizon_conditions(T, E0, tau0, delta, eps, C1=1.0, C2=1.0) -> list[bool]:
    """The four time-horizon inequalities, each monotone in T."""
    q = T**0.25
    h = math.sqrt(T)
    return [
        q * C2 * (1 + delta) * (h / eps + 1) <= 1.0,
        h * C1 * (1 + delta) * (h + 1) * math.sqrt(1.5 * E0) <= tau0 / 8,
        T <= tau0 / 4,
        q * (1 + E0**0.25) <= 1.0 / 16,
    ]


def select_parameters(E0: float, tau0: float, C0_tilde: float = 1.0, C1: float = 1.0,
                      C2: float = 1.0, floor: float = 1e-12, iterations: int = 80) -> CertifiedParams:
    """delta first, then eps, then the largest admissible T* <= eps."""
    if E0 <= 0 or tau0 <= 0:
        raise ValueError("E0 and tau0 must be positive")
    delta = select_delta(C0_tilde)
    eps = select_eps(E0, tau0, C1)
    ok = lambda T: all(horizon_conditions(T, E0, tau0, delta, eps, C1, C2))
    if ok(eps):
        return CertifiedParams(delta, eps, eps)
    lo, hi = 0.0, eps
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    if lo < floor:
        raise CertificationError("data too large for certified run")
    return CertifiedParams(delta, eps, lo)


def warn_if_underresolved(grid, wbar, A, tau, r, t, eps) -> bool:
    flag = resolution_flag(grid, wbar, A, tau, r, t, eps)
    if flag:
        warnings.warn("radius under-resolved: top third of the band carries > 1% of the norm")
    return flag
