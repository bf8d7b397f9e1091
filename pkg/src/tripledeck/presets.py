"""Named initial-data families used by the CLI, the demos and the tests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import spectral as sp
from .benjamin_ono import bo_rhs, bo_soliton
from .errors import ConfigurationError
from .norms import composite_norms, NormParams, select_delta
from .prandtl import DeckState, Switches, prandtl_rhs


@dataclass
class Preset:
    name: str
    wbar: np.ndarray
    A: np.ndarray
    switches: Switches
    bo_only: bool = False
    track_radius: bool = True
    forcing: Callable | None = None
    exact: Callable | None = None     # t -> (wbar, A) when known
    info: dict | None = None


def _profile(y: np.ndarray) -> np.ndarray:
    """Gaussian-modulated column y exp(-y^2 / 2), exactly zero on both walls."""
    col = y * np.exp(-0.5 * y * y)
    col[-1] = 0.0
    return col


def smooth_state(grid: sp.Grid, amplitude: float = 0.3, modes: int = 3, seed: int = 0):
    """Low-mode Hermitian state with Gaussian columns; deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    w = grid.zeros()
    A = grid.zeros_surface()
    col = _profile(grid.y)
    w[0] = 0.2 * amplitude / 0.3 * col
    for k in range(1, modes + 1):
        c = complex(rng.normal(), rng.normal()) * amplitude / k**2
        a = complex(rng.normal(), rng.normal()) * amplitude / k**2
        w[k] = c * col
        w[-k] = np.conj(w[k])
        A[k] = a
        A[-k] = np.conj(a)
    return w, A


def deck_state(grid: sp.Grid, peak: float = 0.6, seed: int = 0):
    """``smooth_state`` rescaled so the physical displacement peaks at ``peak``."""
    w, A = smooth_state(grid, seed=seed)
    scale = peak / np.max(np.abs(sp.inverse_transform(grid, A)))
    return w * scale, A * scale


def small_data_certified(grid: sp.Grid, tau0: float = 1.0, r: float = 2.5,
                         target_E0: float = 0.9e-2) -> Preset:
    """Two-mode state scaled so the initial energy at radius 10 tau0 is ``target_E0``."""
    w, A = smooth_state(grid, modes=2, seed=1)
    p = NormParams(10.0 * tau0, r, select_delta(), 1.0 / 64)
    X = composite_norms(grid, w, A, 0.0, p)["X"]
    scale = np.sqrt(target_E0) / X
    return Preset("small-data-certified", w * scale, A * scale, Switches(),
                  info={"target_E0": target_E0})


def heat_column(grid: sp.Grid, centre: float = 4.0) -> Preset:
    """Mean-mode Gaussian (with its wall image) and nonlinearity off."""
    y = grid.y
    w = grid.zeros()
    w[0] = np.exp(-(y - centre) ** 2) - np.exp(-(y + centre) ** 2)
    w[0, -1] = 0.0

    def exact(t):
        s = 1.0 + 4.0 * t
        out = grid.zeros()
        out[0] = (np.exp(-(y - centre) ** 2 / s) - np.exp(-(y + centre) ** 2 / s)) / np.sqrt(s)
        return out, grid.zeros_surface()

    return Preset("heat-column", w, grid.zeros_surface(), Switches(False, False),
                  track_radius=False, exact=exact)


def soliton(grid: sp.Grid, c: float = 0.3) -> Preset:
    sol = bo_soliton(grid, c)
    A = sp.dealias(grid, sol.spectrum)
    return Preset("bo-soliton", grid.zeros(), A, Switches(True, False), bo_only=True,
                  track_radius=False, exact=lambda t: (grid.zeros(), sol.exact(grid, t)),
                  info={"sign": sol.sign, "speed": sol.speed, "c": c})


def manufactured(grid: sp.Grid, eps: float = 1.0 / 64, amplitude: float = 0.3) -> Preset:
    """Full coupled system with forcing chosen so a known state is exact.

    The target is ``wbar = exp(-t) w0``, ``A = cos(t) A0 + sin(t) A1``; the
    forcing is its time derivative minus the semi-discrete right-hand side,
    so any remaining error is time-discretization error.
    """
    w0, A0 = smooth_state(grid, amplitude, seed=2)
    _, A1 = smooth_state(grid, amplitude, seed=3)
    sw = Switches()

    def exact(t):
        return np.exp(-t) * w0, np.cos(t) * A0 + np.sin(t) * A1

    def forcing(g, t):
        w, A = exact(t)
        dw = -w
        dA = -np.sin(t) * A0 + np.cos(t) * A1
        Fw = dw - prandtl_rhs(g, DeckState(w, A, t, eps), sw)
        Fw[:, 0] = 0.0
        Fw[:, -1] = 0.0
        FA = dA - bo_rhs(g, A, w, t, eps)
        return Fw, FA

    return Preset("manufactured-convergence", w0, A0, sw, track_radius=False,
                  forcing=forcing, exact=exact)


PRESETS = {
    "small-data-certified": small_data_certified,
    "bo-soliton": soliton,
    "heat-column": heat_column,
    "manufactured-convergence": manufactured,
}


def make_preset(name: str, grid: sp.Grid, **kw) -> Preset:
    if name not in PRESETS:
        raise ConfigurationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return PRESETS[name](grid, **kw)
