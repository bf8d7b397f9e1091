"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python tests/test_acceptance.py``.
"""

import json
import time

import numpy as np

from conftest import record_criterion
from tripledeck import spectral as sp
from tripledeck import weights as wt
from tripledeck.audit import (audit_A_identity, audit_vorticity_identity, audit_w_identity,
                              refinement_ratio)
from tripledeck.benjamin_ono import bo_invariants
from tripledeck.cli import EXIT_OK, main
from tripledeck.decks import blasius_solve, matching_slope
from tripledeck.norms import initial_energy, select_delta
from tripledeck.presets import deck_state, heat_column, small_data_certified, smooth_state, soliton
from tripledeck.prandtl import DeckState, dy_terms, term_B, term_B_original, term_N
from tripledeck.selftest import random_state
from tripledeck.stepper import Integrator, ModelParams, StepperConfig

EPS = 1.0 / 64


def test_01_convolution_oracle():
    g = sp.Grid(32, 20.0, 64, 12.0)
    rng = np.random.default_rng(1)
    f, _ = random_state(g, rng)
    h, _ = random_state(g, rng)
    start = time.perf_counter()
    fast = sp.convolve(g, f, h)
    elapsed = time.perf_counter() - start
    diff = float(np.max(np.abs(fast - sp.convolve_direct(g, f, h))))
    ok = diff < 1e-12 and elapsed < 1.0
    record_criterion(1, "convolution oracle", ok, f"max diff {diff:.2e}, {elapsed * 1e3:.1f} ms")
    assert ok


def test_02_dispersion_skew():
    g = sp.Grid(64)
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(100):
        a = sp.forward_transform(g, rng.normal(size=g.n_modes))
        b = 1j * g.xi_odd * np.abs(g.xi) * a
        worst = max(worst, abs(np.vdot(b, a).real) / np.sum(np.abs(a) ** 2))
    ok = worst < 1e-13
    record_criterion(2, "dispersion skew-adjointness", ok, f"worst relative {worst:.2e}")
    assert ok


def test_03_hardy_suite():
    rng = np.random.default_rng(3)
    y = np.linspace(0, 12, 4097)
    violations = 0
    for _ in range(100):
        c = rng.normal(size=4)
        q = rng.uniform(0.5, 3.0, size=4)
        f = sum(ci * np.sin(qi * y) for ci, qi in zip(c, q)) * np.exp(-rng.uniform(0.3, 1.5) * y * y)
        violations += not wt.hardy_check(y, f, rng.uniform(0, 0.02), EPS).satisfied
    ok = violations == 0
    record_criterion(3, "weighted Hardy suite", ok, f"{violations} violations in 100")
    assert ok


def test_04_heat_column():
    g = sp.Grid(8, 20.0, 512, 12.0)
    pre = heat_column(g)
    it = Integrator(g, ModelParams(switches=pre.switches),
                    StepperConfig(dt=1e-4, t_end=0.1, track_radius=False, ledger_every=100))
    start = time.perf_counter()
    s = it.run_to_end(it.start(pre.wbar, pre.A, 1.0)).run.state
    elapsed = time.perf_counter() - start
    exact = pre.exact(0.1)[0][0]
    err = float(np.linalg.norm(s.wbar[0] - exact) / np.linalg.norm(exact))
    ok = err < 1e-6 and elapsed < 30
    record_criterion(4, "heat column", ok, f"rel L2 error {err:.2e}, {elapsed:.1f} s")
    assert ok


def test_05_bo_soliton():
    g = sp.Grid(512, 40.0, 16, 8.0)
    pre = soliton(g, 0.3)
    it = Integrator(g, ModelParams(switches=pre.switches),
                    StepperConfig(dt=1e-3, t_end=1.0, bo_only=True, track_radius=False,
                                  ledger_every=1000))
    start = time.perf_counter()
    A = it.run_to_end(it.start(pre.wbar, pre.A, 1.0)).run.state.A
    elapsed = time.perf_counter() - start
    exact = pre.exact(1.0)[1]
    err = float(np.max(np.abs(sp.inverse_transform(g, A) - sp.inverse_transform(g, exact))))
    i0, i1 = bo_invariants(g, pre.A), bo_invariants(g, A)
    mean_drift = abs(i1["mean"] - i0["mean"])
    mass_drift = abs(i1["l2_mass"] - i0["l2_mass"]) / i0["l2_mass"]
    ok = err < 1e-3 and mean_drift < 1e-14 and mass_drift < 1e-8 and elapsed < 60
    record_criterion(5, "Benjamin-Ono soliton", ok,
                     f"Linf {err:.2e}, mean drift {mean_drift:.1e}, mass drift {mass_drift:.1e}, "
                     f"{elapsed:.1f} s")
    assert ok


def test_06_forcing_forms():
    g = sp.Grid(32, 20.0, 128, 12.0)
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(20):
        w, A = random_state(g, rng, 0.1)
        worst = max(worst, float(np.max(np.abs(term_B(g, w, A, 0.003, EPS)
                                               - term_B_original(g, w, A, 0.003, EPS)))))
    ok = worst < 1e-10
    record_criterion(6, "forcing rewrite equivalence", ok, f"max diff {worst:.2e}")
    assert ok


def _ledger(g, w, A, dt):
    it = Integrator(g, ModelParams(), StepperConfig(dt=dt, t_end=0.01))
    return it.run_to_end(it.start(w, A, 1.0)).ledger.as_arrays()


def test_07_identity_audits():
    g = sp.Grid(64, 20.0, 256, 12.0)
    w, A = smooth_state(g)
    coarse, fine = _ledger(g, w, A, 2e-4), _ledger(g, w, A, 1e-4)
    ratios = {}
    odd = 0.0
    for audit in (audit_A_identity, audit_w_identity, audit_vorticity_identity):
        c, f = audit(coarse), audit(fine)
        ratios[c.name] = refinement_ratio(c, f)
        odd = max(odd, c.max_oddness, f.max_oddness)
    ok = all(3.0 <= r <= 5.0 for r in ratios.values()) and odd < 1e-12
    detail = ", ".join(f"{k} {v:.3f}" for k, v in ratios.items()) + f"; oddness {odd:.1e}"
    record_criterion(7, "energy identity audits", ok, detail)
    assert ok


def test_08_dy_commutation():
    errs = []
    for n in (129, 257, 513):
        g = sp.Grid(32, 20.0, n, 12.0)
        w, A = smooth_state(g)
        d = dy_terms(g, w, A, 0.0, EPS)["dyN"]
        errs.append(float(np.max(np.abs(d[:, 2:-2] - sp.ddy(g, term_N(g, w))[:, 2:-2]))))
    orders = np.log2(np.array(errs[:-1]) / errs[1:])
    ok = bool(np.all(orders > 1.8))
    record_criterion(8, "y-derivative commutation", ok,
                     "orders " + ", ".join(f"{o:.2f}" for o in orders))
    assert ok


def test_09_certified_run(tmp_path):
    out = tmp_path / "cert"
    start = time.perf_counter()
    code = main(["run", "--preset", "small-data-certified", "--output", str(out)])
    elapsed = time.perf_counter() - start
    man = json.loads((out / "manifest.json").read_text())
    led = np.genfromtxt(out / "ledger.csv", delimiter=",", names=True)
    E0 = man["chosen_parameters"]["E0"]
    # recompute E0 at radius 10 tau0 from the preset itself
    g = sp.Grid(64, 20.0, 256, 12.0)
    pre = small_data_certified(g, tau0=1.0)
    E0_direct = initial_energy(g, pre.wbar, pre.A, 1.0, 2.5, select_delta(), EPS)
    ok = (code == EXIT_OK and E0 <= 1e-2 and abs(E0_direct - E0) <= 1e-14 * E0
          and man["checks"]["E_le_2E0"] and man["checks"]["tau_ge_half_tau0"]
          and float(np.max(led["E"])) <= 2 * E0
          and float(np.min(led["tau"])) >= 0.5 * man["model"]["tau0"]
          and led["t"][-1] == man["chosen_parameters"]["T_star"] and elapsed < 120)
    record_criterion(9, "certified small-data run", ok,
                     f"E0 {E0:.3e}, max E/E0 {np.max(led['E']) / E0:.3f}, "
                     f"min tau {np.min(led['tau']):.5f}, T* {led['t'][-1]:.3e}, {elapsed:.1f} s")
    assert ok


def test_10_blasius():
    base = blasius_solve()
    halved = blasius_solve(h=0.005)
    longer = blasius_solve(eta_max=24.0)
    d_int = abs(base.fpp0 - halved.fpp0)
    d_dom = abs(base.fpp0 - longer.fpp0)
    ok = d_int < 1e-6 and d_dom < 1e-8 and 0.4 < base.fpp0 < 0.5
    record_criterion(10, "Blasius wall shear", ok,
                     f"f''(0) {base.fpp0:.10f}, step-halved gap {d_int:.1e}, domain gap {d_dom:.1e}")
    assert ok


def test_11_deck_matching():
    g = sp.Grid(64, 20.0, 256, 12.0)
    w, A = deck_state(g)
    slope, errs = matching_slope(g, DeckState(w, A, 0.0, EPS), blasius_solve())
    ok = abs(slope - 0.125) <= 0.15
    record_criterion(11, "deck matching order", ok,
                     f"slope {slope:.4f}, errors " + ", ".join(f"{e:.3e}" for e in errs))
    assert ok


def test_12_determinism(tmp_path):
    texts = []
    for name in ("a", "b"):
        assert main(["run", "--preset", "small-data-certified", "--output", str(tmp_path / name)]) == 0
        texts.append((tmp_path / name / "ledger.csv").read_bytes())
    ok = texts[0] == texts[1]
    record_criterion(12, "byte-identical reruns", ok, f"{len(texts[0])} bytes")
    assert ok


if __name__ == "__main__":
    import sys
    import tempfile
    from pathlib import Path

    failed = 0
    for name, fn in sorted(globals().items()):
        if not name.startswith("test_"):
            continue
        try:
            if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
