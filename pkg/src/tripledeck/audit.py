"""Energy-identity residuals, oddness scalars and nonlinear-bound ratios.

Per ledger row the stepper records the pieces of three balances, all in
the weighted inner products of the analytic norms:

    d/dt eA + (-tau') dA = T_A1 - T_A2
    d/dt eW + (-tau') dW = linW + dampW - T_N - T_L - T_M - T_B
    d/dt eV + (-tau') dV = linV + dampV - TdN_d - TdL_d - TdM_d - TdB_d

``e*`` are half squared norms, ``d*`` the same norms with ``|xi|^{1/2}``
inserted, ``lin*`` the diffusion and transport pairing and ``damp*`` the
weight-decay pairing.  The vorticity balance pairs ``chi D1`` of each term
with ``chi D1 wbar`` (``D1`` the stepper's y-difference), so every identity
is exact for the semi-discrete system and the residuals only see the time
discretization and the centred differences.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import spectral as sp
from . import weights as wt
from .benjamin_ono import bo_nonlinear, bo_invariants
from .norms import NormParams, composite_norms, gammas, norm_tau_r, norm_tilde
from .prandtl import Lift, Switches, Terms, compute_terms, dy_terms


def _mode_weight(grid: sp.Grid, tau: float, r: float) -> np.ndarray:
    return grid.dxi * np.exp(2.0 * tau * np.abs(grid.xi) + r * np.log1p(grid.xi**2))


class Pairing:
    """Weighted real inner products at one (tau, t)."""

    def __init__(self, grid: sp.Grid, tau: float, r: float, t: float, eps: float):
        self.grid = grid
        self.W = _mode_weight(grid, tau, r)
        self.W_lag = _mode_weight(grid, tau, r - 0.5)
        self.yw = grid.trap * wt.rho2(grid.y, t, eps)

    def field(self, f, g, lag=False, ymul=None) -> float:
        w = self.yw if ymul is None else self.yw * ymul
        per_mode = np.real(np.einsum("kj,kj,j->k", f, np.conj(g), w))
        return float(np.dot(per_mode, self.W_lag if lag else self.W))

    def surface(self, f, g) -> float:
        return float(np.dot(np.real(f * np.conj(g)), self.W))


def _oddness(per_mode: np.ndarray, W: np.ndarray, xi: np.ndarray) -> float:
    """|sum xi q W| relative to sum |xi| q W."""
    scale = float(np.dot(np.abs(xi) * per_mode, W))
    if scale == 0.0:
        return 0.0
    return abs(float(np.dot(xi * per_mode, W))) / scale


def ledger_row(grid: sp.Grid, wbar: np.ndarray, A: np.ndarray, t: float, tau: float,
               p: NormParams, terms: Terms | None, switches: Switches = Switches(),
               C1: float = 1.0, C2: float = 1.0, lift: Lift | None = None) -> dict:
    """Norms, radius rates and every audited pairing for one state.

    ``terms`` may be None when wbar is frozen at zero (Benjamin-Ono mode).
    """
    r, eps = p.r, p.eps
    ip = Pairing(grid, tau, r, t, eps)
    xi = grid.xi_odd
    norms = composite_norms(grid, wbar, A, t, p)
    g1, g2 = gammas(norms["X"], norms["Z"], norms["H"], eps, p.delta, C1, C2)
    row = {"t": t, "tau": tau, **norms, "Gamma1": g1, "Gamma2": g2}

    absxi = np.abs(grid.xi)
    row["eA"] = 0.5 * ip.surface(A, A)
    row["dA"] = ip.surface(absxi * A, A)
    row["T_A1"] = ip.surface(1j * xi * sp.integrate_y(grid, wbar, "inf"), A) if switches.coupling else 0.0
    row["T_A2"] = ip.surface(bo_nonlinear(grid, A), A) if switches.nonlinear else 0.0
    row.update(bo_invariants(grid, A))

    sq = lambda f: np.real(f * np.conj(f)) @ ip.yw
    row["eW"] = 0.5 * ip.field(wbar, wbar)
    row["dW"] = float(np.dot(absxi * sq(wbar), ip.W))
    row["odd_w"] = _oddness(sq(wbar), ip.W, grid.xi)

    chi = wt.chi(grid.y)
    q = chi * sp.ddy(grid, wbar)
    row["eV"] = 0.5 * ip.field(q, q, lag=True)
    row["dV"] = float(np.dot(absxi * sq(q), ip.W_lag))
    row["odd_v"] = _oddness((np.real(q * np.conj(q)) * grid.y) @ ip.yw, ip.W_lag, grid.xi)

    if terms is None:
        for name in ("linW", "dampW", "T_N", "T_L", "T_M", "T_B", "linV", "dampV",
                     "TdN_d", "TdL_d", "TdM_d", "TdB_d", "T_dyN", "T_dyL", "T_dyM", "T_dyB"):
            row[name] = 0.0
        return row

    lin = sp.laplacian_compact(grid, wbar) - 1j * xi[:, None] * grid.y * wbar
    row["linW"] = ip.field(lin, wbar)
    row["dampW"] = ip.field(wbar, wbar, ymul=wt.dt_log_rho(grid.y, t, eps))
    row["linV"] = ip.field(chi * sp.ddy(grid, lin), q, lag=True)
    row["dampV"] = ip.field(q, q, lag=True, ymul=wt.dt_log_rho(grid.y, t, eps))
    dy = dy_terms(grid, wbar, A, t, eps, switches, lift)
    for name in ("N", "L", "M", "B"):
        f = getattr(terms, name)
        row[f"T_{name}"] = ip.field(f, wbar)
        row[f"Td{name}_d"] = ip.field(chi * sp.ddy(grid, f), q, lag=True)
        row[f"T_dy{name}"] = ip.field(chi * dy[f"dy{name}"], q, lag=True)
    return row


# -- identity residuals ----------------------------------------------------

def _centred(v: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.full_like(v, np.nan)
    out[1:-1] = (v[2:] - v[:-2]) / (t[2:] - t[:-2])
    return out


def identity_residuals(cols: dict) -> dict:
    """Residual columns of the three balances (NaN at the end rows)."""
    t = cols["t"]
    if t.size < 3:
        nan = np.full(t.size, np.nan)
        return {"residual_A": nan, "residual_w": nan.copy(), "residual_vort": nan.copy()}
    rate = -_centred(cols["tau"], t)
    res_a = _centred(cols["eA"], t) + rate * cols["dA"] - (cols["T_A1"] - cols["T_A2"])
    rhs_w = cols["linW"] + cols["dampW"] - cols["T_N"] - cols["T_L"] - cols["T_M"] - cols["T_B"]
    res_w = _centred(cols["eW"], t) + rate * cols["dW"] - rhs_w
    rhs_v = (cols["linV"] + cols["dampV"] - cols["TdN_d"] - cols["TdL_d"]
             - cols["TdM_d"] - cols["TdB_d"])
    res_v = _centred(cols["eV"], t) + rate * cols["dV"] - rhs_v
    return {"residual_A": res_a, "residual_w": res_w, "residual_vort": res_v}


@dataclass
class IdentityRecord:
    name: str
    t: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    residual: np.ndarray
    oddness: np.ndarray | None = None

    @property
    def max_residual(self) -> float:
        r = self.residual[np.isfinite(self.residual)]
        return float(np.max(np.abs(r))) if r.size else 0.0

    @property
    def max_oddness(self) -> float:
        return 0.0 if self.oddness is None else float(np.max(self.oddness))


def _window(cols: dict) -> dict:
    if cols["t"].size < 3:
        raise ValueError("identity audit needs at least three ledger samples")
    return cols


def audit_A_identity(cols: dict) -> IdentityRecord:
    c = _window(cols)
    rate = -_centred(c["tau"], c["t"])
    lhs = _centred(c["eA"], c["t"]) + rate * c["dA"]
    rhs = c["T_A1"] - c["T_A2"]
    return IdentityRecord("A", c["t"], lhs, rhs, lhs - rhs)


def audit_w_identity(cols: dict) -> IdentityRecord:
    c = _window(cols)
    rate = -_centred(c["tau"], c["t"])
    lhs = _centred(c["eW"], c["t"]) + rate * c["dW"]
    rhs = c["linW"] + c["dampW"] - c["T_N"] - c["T_L"] - c["T_M"] - c["T_B"]
    return IdentityRecord("wbar", c["t"], lhs, rhs, lhs - rhs, c["odd_w"])


def audit_vorticity_identity(cols: dict) -> IdentityRecord:
    c = _window(cols)
    rate = -_centred(c["tau"], c["t"])
    lhs = _centred(c["eV"], c["t"]) + rate * c["dV"]
    rhs = c["linV"] + c["dampV"] - c["TdN_d"] - c["TdL_d"] - c["TdM_d"] - c["TdB_d"]
    return IdentityRecord("vorticity", c["t"], lhs, rhs, lhs - rhs, c["odd_v"])


def refinement_ratio(coarse: IdentityRecord, fine: IdentityRecord) -> float:
    """Ratio of max residuals over the common interior window.

    The fine record is sampled at the coarse times; both exclude the first
    and last two coarse samples so start-up steps do not dominate.
    """
    tc = coarse.t
    idx = np.searchsorted(fine.t, tc[2:-2])
    rc = np.abs(coarse.residual[2:-2])
    rf = np.abs(fine.residual[idx])
    return float(np.max(rc) / np.max(rf))


# -- nonlinear-bound ratios -------------------------------------------------

BOUND_LABELS = ["T_A1", "T_A2", "T_N", "T_L", "T_M", "T_B",
                "T_dyN", "T_dyL", "T_dyM", "T_dyB"]


def bound_sides(grid: sp.Grid, wbar: np.ndarray, A: np.ndarray, t: float, tau: float,
                p: NormParams, row: dict | None = None, switches: Switches = Switches()) -> dict:
    """|T| and the right-hand norm combination of each of the ten bounds."""
    r, eps = p.r, p.eps
    if row is None:

        terms = compute_terms(grid, wbar, A, t, eps, switches)
        row = ledger_row(grid, wbar, A, t, tau, p, terms, switches)
    chi = wt.chi(grid.y)
    wy = sp.ddy(grid, wbar)
    wyy = sp.d2dy2(grid, wbar)
    n = lambda f, rr, **kw: norm_tau_r(grid, f, tau, rr, t, eps, **kw)
    w_h = n(wbar, r, multiplier="half_abs")
    w_b = n(wbar, r, multiplier="half_bracket")
    w0 = n(wbar, r)
    wy0 = n(wy, r)
    cwy = n(wy, r - 0.5, y_weight=chi)
    cwy_h = n(wy, r - 0.5, y_weight=chi, multiplier="half_abs")
    cwy_b = n(wy, r - 0.5, y_weight=chi, multiplier="half_bracket")
    cwyy = n(wyy, r - 0.5, y_weight=chi)
    ycwy = n(wy, r - 0.5, y_weight=grid.y * chi)
    a0 = norm_tilde(grid, A, tau, r)
    a_h = norm_tilde(grid, A, tau, r, multiplier="half_abs")
    a_b = norm_tilde(grid, A, tau, r, multiplier="half_bracket")
    rhs = {
        "T_A1": w_h * a_h,
        "T_A2": a_h**2 * a0 + a_h * a0**2,
        "T_N": w_h * w_b * wy0,
        "T_L": w_h * w0 * a_h + (w0**2 + w_h**2) * a0,
        "T_M": w_b * a_b * (wy0 + ycwy),
        "T_B": w0 * a0 / eps + a_b * wy0 + w_h**2 + w_h * w0 + w_b * a_h * a0,
        "T_dyN": cwy_b**2 * wy0 + cwyy * cwy * w_b,
        "T_dyL": cwy**2 * a_h + cwy * w_b * a0 + cwy_h * cwy_b * a0,
        "T_dyM": cwy**2 * a_h + ycwy * cwyy * a_h,
        "T_dyB": (a0 / eps + w_b + a_b + a0**2 + a_h * a0) * cwy,
    }
    return {k: (abs(row[k]), rhs[k]) for k in BOUND_LABELS}


@dataclass
class BoundRecord:
    label: str
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float | None:
        if self.rhs == 0.0:
            return None if self.lhs == 0.0 else math.inf
        return self.lhs / self.rhs

    @property
    def status(self) -> str:
        if self.ratio is None:
            return "inactive"
        return "finite" if math.isfinite(self.ratio) else "unbounded"


def audit_lemma_bounds(grid, wbar, A, t, tau, p: NormParams, row=None,
                       switches: Switches = Switches()) -> list[BoundRecord]:
    sides = bound_sides(grid, wbar, A, t, tau, p, row, switches)
    return [BoundRecord(k, *sides[k]) for k in BOUND_LABELS]


def ratio_stability(ratios_by_resolution: dict, factor: float = 2.0) -> dict:
    """Flag labels whose ratio moves by more than ``factor`` across resolutions."""
    out = {}
    labels = next(iter(ratios_by_resolution.values())).keys()
    for lab in labels:
        vals = [v[lab] for v in ratios_by_resolution.values() if v[lab] not in (None, 0.0)]
        if len(vals) < 2:
            out[lab] = {"spread": 1.0, "stable": True}
            continue
        spread = max(vals) / min(vals)
        out[lab] = {"spread": spread, "stable": spread <= factor}
    return out


# -- report ----------------------------------------------------------------

@dataclass
class AuditReport:
    identities: list[IdentityRecord]
    bounds: list[tuple[float, list[BoundRecord]]] = field(default_factory=list)
    tolerances: dict = field(default_factory=lambda: {"oddness": 1e-12})

    def passed(self) -> dict:
        tol = self.tolerances["oddness"]
        flags = {f"oddness_{r.name}": r.max_oddness < tol for r in self.identities
                 if r.oddness is not None}
        flags["bounds_finite"] = all(b.status != "unbounded" for _, recs in self.bounds for b in recs)
        return flags

    def summary(self) -> dict:
        return {
            "identities": {r.name: {"max_residual": r.max_residual,
                                    "max_oddness": r.max_oddness} for r in self.identities},
            "bounds": [{"t": t, **{b.label: b.ratio for b in recs}} for t, recs in self.bounds],
            "tolerances": self.tolerances,
            "passed": self.passed(),
        }

    def write(self, csv_path, json_path) -> None:
        with open(csv_path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["identity", "t", "lhs", "rhs", "residual", "oddness"])
            for rec in self.identities:
                for i in range(rec.t.size):
                    odd = "" if rec.oddness is None else repr(float(rec.oddness[i]))
                    wr.writerow([rec.name, repr(float(rec.t[i])), repr(float(rec.lhs[i])),
                                 repr(float(rec.rhs[i])), repr(float(rec.residual[i])), odd])
        with open(json_path, "w") as fh:
            json.dump(_clean(self.summary()), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _clean(v):
    """Non-finite floats become strings so the summary stays valid JSON."""
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_clean(x) for x in v]
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def build_report(cols: dict, bounds=None) -> AuditReport:
    recs = [audit_A_identity(cols), audit_w_identity(cols), audit_vorticity_identity(cols)]
    return AuditReport(recs, bounds or [])
