"""Fast property checks behind ``tripledeck selftest``."""

from __future__ import annotations

import numpy as np

from . import checkpoint as ckpt
from . import spectral as sp
from . import weights as wt
from .audit import ledger_row
from .norms import NormParams
from .prandtl import compute_terms, term_B_original


def random_state(grid: sp.Grid, rng, scale: float = 1.0):
    """Random Hermitian state in the retained band with decaying columns."""
    y = grid.y
    w = (rng.normal(size=(grid.n_modes, grid.n_y))
         + 1j * rng.normal(size=(grid.n_modes, grid.n_y))) * (y * np.exp(-y * y / 4))
    w = sp.from_physical(grid, sp.inverse_transform(grid, sp.dealias(grid, w)))
    w[:, 0] = w[:, -1] = 0.0
    A = sp.forward_transform(grid, sp.inverse_transform(
        grid, sp.dealias(grid, rng.normal(size=grid.n_modes) + 1j * rng.normal(size=grid.n_modes))))
    return scale * w, scale * sp.dealias(grid, A)


def _convolution(rng) -> bool:
    g = sp.Grid(32, 20.0, 64, 12.0)
    f, _ = random_state(g, rng)
    h, _ = random_state(g, rng)
    return float(np.max(np.abs(sp.convolve(g, f, h) - sp.convolve_direct(g, f, h)))) < 1e-12


def _skew(rng) -> bool:
    g = sp.Grid(64)
    for _ in range(20):
        a = sp.forward_transform(g, rng.normal(size=g.n_modes))
        b = 1j * g.xi_odd * np.abs(g.xi) * a
        if abs(np.sum(a * np.conj(b)).real) >= 1e-13 * np.sum(np.abs(a) ** 2):
            return False
    return True


def _hardy(rng) -> bool:
    y = np.linspace(0.0, 12.0, 2049)
    for _ in range(20):
        c = rng.normal(size=3)
        f = y * (c[0] + c[1] * y + c[2] * y * y) * np.exp(-y * y / 2)
        if not wt.hardy_check(y, f, 0.0, 1.0 / 64).satisfied:
            return False
    return True


def _b_forms(rng) -> bool:
    g = sp.Grid(32, 20.0, 128, 12.0)
    for _ in range(3):
        w, A = random_state(g, rng, 0.1)
        B = compute_terms(g, w, A, 0.0, 1.0 / 64).B
        if np.max(np.abs(B - term_B_original(g, w, A, 0.0, 1.0 / 64))) > 1e-10:
            return False
    return True


def _oddness(rng) -> bool:
    g = sp.Grid(32, 20.0, 64, 12.0)
    w, A = random_state(g, rng)
    row = ledger_row(g, w, A, 0.0, 0.5, NormParams(0.5), None)
    return row["odd_w"] < 1e-12 and row["odd_v"] < 1e-12


def _checkpoint(rng) -> bool:
    g = sp.Grid(16, 20.0, 32, 12.0)
    w, A = random_state(g, rng)
    ck = ckpt.Checkpoint(w, A, 0.1, 0.9, 1 / 64, 4.0, 2.5, 20.0, 12.0)
    raw = ckpt.to_bytes(ck)
    return ckpt.to_bytes(ckpt.from_bytes(raw)) == raw


CHECKS = {
    "convolution oracle": _convolution,
    "dispersion skew-adjointness": _skew,
    "weighted Hardy inequality": _hardy,
    "forcing rewrite equivalence": _b_forms,
    "oddness cancellation": _oddness,
    "checkpoint round trip": _checkpoint,
}


def run_all(seed: int = 0, out=print) -> bool:
    rng = np.random.default_rng(seed)
    ok = True
    for name, fn in CHECKS.items():
        passed = bool(fn(rng))
        ok &= passed
        out(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
