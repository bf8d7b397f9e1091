"""Semi-implicit time integration of (wbar, A) and the shrinking radius.

One step of length dt:

* wbar: Strang splitting.  Half a step of the exact transport phase
  ``exp(-i xi y dt/2)``, one Crank-Nicolson step of the compact ``d2/dy2``
  with the explicit forcing ``G = -(N + L + M + B)`` extrapolated to the
  midpoint, then the second half phase.
* A: the dispersion ``i xi |xi|`` is removed by its integrating factor and
  the remaining right-hand side is advanced with the same explicit rule.
* the explicit rule is AB2; the first step (and every step of the
  ``IMEX-RK2`` scheme) is a Heun predictor-corrector.
* tau_{n+1} = tau_n - dt (Gamma1_n + 1).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import spectral as sp
from .audit import ledger_row
from .benjamin_ono import bo_rhs
from .errors import BlowUpError, ConfigurationError, RadiusExhaustedError
from .ledger import EnergyLedger
from .norms import NormParams, advance_tau, composite_norms, gammas, select_delta
from .prandtl import DeckState, Lift, Switches, compute_terms

SCHEMES = ("CNAB2", "IMEX-RK2")


@dataclass
class StepperConfig:
    dt: float = 2e-4
    scheme: str = "CNAB2"
    t_end: float = 0.01
    cfl: float = 0.5
    checkpoint_every: int = 0
    ledger_every: int = 1
    bo_only: bool = False
    track_radius: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigurationError("dt must be positive")
        if self.t_end < 0:
            raise ConfigurationError("t_end must be nonnegative")
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"scheme must be one of {SCHEMES}")
        if self.ledger_every < 1:
            raise ConfigurationError("ledger_every must be >= 1")

    def n_steps(self) -> int:
        return 0 if self.t_end == 0 else max(1, math.ceil(self.t_end / self.dt - 1e-9))

    def effective_dt(self) -> float:
        """dt shrunk so that an integer number of steps lands on t_end."""
        n = self.n_steps()
        return self.dt if n == 0 else self.t_end / n


# forcing hook: (grid, t) -> (F_w, F_A), added to the explicit right-hand sides
Forcing = Callable[[sp.Grid, float], tuple]


@dataclass
class ModelParams:
    r: float = 2.5
    delta: float = field(default_factory=select_delta)
    eps: float = 1.0 / 64
    C1: float = 1.0
    C2: float = 1.0
    switches: Switches = field(default_factory=Switches)
    forcing: Forcing | None = None

    def norm_params(self, tau: float) -> NormParams:
        return NormParams(tau, self.r, self.delta, self.eps)


@dataclass
class RunState:
    state: DeckState
    tau: float
    step: int
    ledger: EnergyLedger
    tau0: float = 0.0
    t0: float = 0.0
    gamma_int: float = 0.0
    max_cfl: float = 0.0
    # explicit right-hand sides at the current and previous step
    _now: tuple | None = None
    _prev: tuple | None = None
    _gamma1: float = 0.0


@dataclass
class RunResult:
    run: RunState
    ledger: EnergyLedger
    reason: str
    error: Exception | None = None


class Integrator:
    def __init__(self, grid: sp.Grid, model: ModelParams, cfg: StepperConfig):
        self.grid = grid
        self.model = model
        self.cfg = cfg
        self.dt = cfg.effective_dt()
        xi = grid.xi_odd
        self.compact = sp.CompactOperator(grid, self.dt)
        self.half_phase = np.exp(-0.5j * self.dt * xi[:, None] * grid.y[None, :])
        self.disp = np.exp(-1j * self.dt * xi * np.abs(grid.xi))
        self._warned = False

    # -- right-hand sides ------------------------------------------------

    def evaluate(self, wbar, A, t):
        """Explicit right-hand sides and the term bundle at one state."""
        g, m = self.grid, self.model
        sw = m.switches
        GA = bo_rhs(g, A, wbar, t, m.eps, coupling=sw.coupling, nonlinear=sw.nonlinear,
                    dispersion=False)
        if self.cfg.bo_only:
            terms, Gw = None, None
        else:
            terms = compute_terms(g, wbar, A, t, m.eps, sw, Lift(g, t, m.eps))
            Gw = -(terms.N + terms.L + terms.M + terms.B)
        if m.forcing is not None:
            Fw, FA = m.forcing(g, t)
            GA = GA + FA
            if Gw is not None:
                Gw = Gw + Fw
        return Gw, GA, terms

    def _strang(self, w, G):
        out = self.compact.cn_step(self.half_phase * w, G)
        out *= self.half_phase
        out[:, 0] = 0.0
        out[:, -1] = 0.0
        return out

    # -- run management ----------------------------------------------------

    def start(self, wbar, A, tau0: float, t0: float = 0.0) -> RunState:
        g = self.grid
        if wbar.shape != (g.n_modes, g.n_y) or A.shape != (g.n_modes,):
            raise ConfigurationError("initial data shape does not match the grid")
        if tau0 <= 0:
            raise ConfigurationError("tau0 must be positive")
        wbar = np.array(wbar, dtype=complex)
        A = np.array(A, dtype=complex)
        if self.cfg.bo_only:
            wbar[:] = 0.0
        run = RunState(DeckState(wbar, A, t0, self.model.eps), tau0, 0,
                       EnergyLedger(self.model.eps), tau0=tau0, t0=t0)
        self._refresh(run, record=True)
        return run

    def _refresh(self, run: RunState, record: bool) -> None:
        """Right-hand sides, norms and (optionally) a ledger row for a new state.

        Raises BlowUpError before anything is recorded if either is not finite.
        """
        s = run.state
        with np.errstate(over="ignore", invalid="ignore"):
            Gw, GA, terms = self.evaluate(s.wbar, s.A, s.t)
            m = self.model
            row = ledger_row(self.grid, s.wbar, s.A, s.t, run.tau, m.norm_params(run.tau),
                             terms, m.switches, m.C1, m.C2) if record else None
            nrm = row if row is not None else composite_norms(
                self.grid, s.wbar, s.A, s.t, m.norm_params(run.tau))
        finite = np.isfinite(GA).all() and (Gw is None or np.isfinite(Gw).all())
        if not (finite and all(math.isfinite(nrm[k]) for k in "XYZH")):
            raise BlowUpError(f"blow-up detected at t = {s.t:.6g}")
        run._now = (Gw, GA)
        if row is None:
            run._gamma1 = gammas(nrm["X"], nrm["Z"], nrm["H"], m.eps, m.delta, m.C1, m.C2)[0]
        else:
            row["gamma_int"] = run.gamma_int
            run._gamma1 = row["Gamma1"]
            run.ledger.append(row)
        self._check_cfl(run)

    def _check_cfl(self, run: RunState) -> None:
        g = self.grid
        s = run.state
        u = np.max(np.abs(sp.to_physical(g, s.wbar))) + np.max(np.abs(sp.inverse_transform(g, s.A)))
        v = np.max(np.abs(sp.integrate_y(g, g.xi_odd[:, None] * s.wbar, "inf")))
        xi_max = g.k_keep / g.L_x
        c = self.dt * (u * xi_max + v / g.dy)
        run.max_cfl = max(run.max_cfl, float(c))
        if c > self.cfg.cfl and not self._warned:
            self._warned = True
            warnings.warn(f"explicit CFL number {c:.3g} exceeds safety factor {self.cfg.cfl}")

    def step(self, run: RunState) -> RunState:
        """Advance by one step; ``run`` is left untouched on failure."""
        if run.tau <= 0:
            raise RadiusExhaustedError("analyticity radius exhausted")
        dt, E = self.dt, self.disp
        s = run.state
        Gw, GA = run._now
        bo_only = self.cfg.bo_only
        with np.errstate(over="ignore", invalid="ignore"):
            if run._prev is None or self.cfg.scheme == "IMEX-RK2":
                w1 = s.wbar if bo_only else self._strang(s.wbar, Gw)
                A1 = E * (s.A + dt * GA)
                Gw1, GA1, _ = self.evaluate(w1, A1, s.t + dt)
                w_new = s.wbar if bo_only else self._strang(s.wbar, 0.5 * (Gw + Gw1))
                A_new = E * s.A + 0.5 * dt * (E * GA + GA1)
            else:
                Gwp, GAp = run._prev
                w_new = s.wbar if bo_only else self._strang(s.wbar, 1.5 * Gw - 0.5 * Gwp)
                A_new = E * s.A + dt * (1.5 * E * GA - 0.5 * E * E * GAp)
        if not (np.all(np.isfinite(w_new)) and np.all(np.isfinite(A_new))):
            raise BlowUpError(f"blow-up detected at t = {s.t + dt:.6g}")

        if self.cfg.track_radius:
            tau = advance_tau(run.tau, run._gamma1, dt)
            gamma_int = run.gamma_int + dt * run._gamma1
        else:
            tau, gamma_int = run.tau, run.gamma_int
        n = run.step + 1
        new = RunState(DeckState(w_new, A_new, run.t0 + n * dt, s.eps), tau, n, run.ledger,
                       run.tau0, run.t0, gamma_int, run.max_cfl, _prev=run._now)
        self._refresh(new, record=(n % self.cfg.ledger_every == 0
                                   or n == self.cfg.n_steps()))
        return new

    def run_to_end(self, run: RunState, on_checkpoint=None, on_step=None) -> RunResult:
        """Loop to t_end or a terminal event; the ledger is finalized in every case.

        ``on_step(run)`` is called after every accepted step, ``on_checkpoint``
        at the configured cadence and once at the end with the last good state.
        """
        cfg = self.cfg
        reason, err = "t_end", None
        try:
            while run.step < cfg.n_steps():
                run = self.step(run)
                if on_step:
                    on_step(run)
                if on_checkpoint and cfg.checkpoint_every and run.step % cfg.checkpoint_every == 0:
                    on_checkpoint(run)
        except RadiusExhaustedError as e:
            reason, err = "radius-exhausted", e
        except BlowUpError as e:
            reason, err = "blow-up", e
        except KeyboardInterrupt as e:
            reason, err = "user-interrupt", e
        run.ledger.finalize()
        if on_checkpoint:
            on_checkpoint(run)
        return RunResult(run, run.ledger, reason, err)


def step(integrator: Integrator, run: RunState) -> RunState:
    return integrator.step(run)


def run_to_end(integrator: Integrator, run: RunState, on_checkpoint=None,
               on_step=None) -> RunResult:
    return integrator.run_to_end(run, on_checkpoint, on_step)
