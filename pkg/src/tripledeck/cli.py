"""Command line entry point: ``tripledeck <command> [options]``.

Exit codes: 0 success, 1 configuration error, 2 blow-up, 3 radius
exhausted, 4 corrupt checkpoint.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import checkpoint as ckpt
from . import spectral as sp
from .audit import audit_lemma_bounds, build_report
from .config import build_config
from .decks import blasius_solve, matching_slope, reconstruct
from .errors import (BlowUpError, ConfigurationError, CorruptCheckpointError,
                     RadiusExhaustedError, TripleDeckError)
from .ledger import EnergyLedger
from .norms import initial_energy, resolution_flag, select_delta, select_parameters
from .presets import deck_state, make_preset
from .prandtl import DeckState, Switches
from .selftest import run_all
from .stepper import Integrator, ModelParams, StepperConfig

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP, EXIT_RADIUS, EXIT_CORRUPT = 0, 1, 2, 3, 4
OUTPUT_ENV = "TDK_OUTPUT_DIR"

SCHEME_NOTES = {
    "wbar": "Strang: half transport phase, Crank-Nicolson with compact d2/dy2, half phase",
    "A": "integrating factor for i xi |xi|; explicit rule on the rest",
    "explicit": "AB2 with a Heun first step (IMEX-RK2: Heun every step)",
    "radius": "tau_{n+1} = tau_n - dt (Gamma1_n + 1)",
}

CAVEAT = ("universal constants of the nonlinear estimates are unquantified; "
          "certified parameters use the configured values")


def _output_dir(cfg, preset: str) -> Path:
    d = cfg.get("output", "directory") or os.environ.get(OUTPUT_ENV) or f"runs/{preset}"
    return Path(d)


def _grid(cfg) -> sp.Grid:
    return sp.Grid(cfg.get("grid", "n_modes"), cfg.get("grid", "L_x"),
                   cfg.get("grid", "n_y"), cfg.get("grid", "y_max"))


def _write_checkpoint(path: Path, run, model: ModelParams, grid: sp.Grid) -> None:
    s = run.state
    ckpt.write(path, ckpt.Checkpoint(s.wbar, s.A, s.t, run.tau, model.eps, model.delta,
                                     model.r, grid.L_x, grid.y_max))


def _load_initial(cfg, grid, resume: str | None):
    """(wbar, A, t0, tau0, preset) from a checkpoint or a named preset."""
    name = cfg.get("initial", "preset")
    kw = {"c": cfg.get("initial", "soliton_c")} if name == "bo-soliton" else {}
    preset = make_preset(name, grid, **kw) if name != "small-data-certified" else \
        make_preset(name, grid, tau0=cfg.get("model", "tau0"), r=cfg.get("model", "r"))
    path = resume or cfg.get("initial", "file")
    if path:
        ck = ckpt.read(path)
        if (ck.n_modes, ck.n_y, ck.L_x, ck.y_max) != (grid.n_modes, grid.n_y, grid.L_x, grid.y_max):
            raise ConfigurationError("checkpoint grid does not match the configured grid")
        return ck.wbar, ck.A, ck.t, ck.tau, preset
    return preset.wbar, preset.A, 0.0, cfg.get("model", "tau0"), preset


def cmd_run(args) -> int:
    text = Path(args.config).read_text() if args.config else None
    cfg = build_config(text, preset=args.preset, certified=True if args.certified else None,
                       output=args.output)
    grid = _grid(cfg)
    wbar, A, t0, tau0, preset = _load_initial(cfg, grid, args.resume)
    model_cfg = {k: cfg.get("model", k) for k in ("r", "C1", "C2")}
    switches = Switches(cfg.get("model", "nonlinear"), cfg.get("model", "coupling"))
    certified = cfg.get("stepper", "certified")
    chosen = {}
    dt, t_end = cfg.get("stepper", "dt"), cfg.get("stepper", "t_end")
    if certified:
        delta0 = select_delta(cfg.get("model", "C0_tilde"))
        E0 = initial_energy(grid, wbar, A, tau0, model_cfg["r"], delta0, 1.0 / 64)
        if resolution_flag(grid, wbar, A, 10 * tau0, model_cfg["r"], 0.0, 1.0 / 64):
            raise ConfigurationError("initial data under-resolve the radius 10 tau0")
        cp = select_parameters(E0, tau0, cfg.get("model", "C0_tilde"), model_cfg["C1"],
                               model_cfg["C2"])
        delta, eps, t_end = cp.delta, cp.eps, cp.T_star
        dt = min(dt, cp.T_star / cfg.get("stepper", "min_steps"))
        chosen = {"E0": E0, "delta": delta, "eps": eps, "T_star": cp.T_star}
    else:
        delta = cfg.get("model", "delta") or select_delta(cfg.get("model", "C0_tilde"))
        eps = cfg.get("model", "eps") or 1.0 / 64
    model = ModelParams(model_cfg["r"], delta, eps, model_cfg["C1"], model_cfg["C2"],
                        switches, preset.forcing)
    scfg = StepperConfig(dt=dt, scheme=cfg.get("stepper", "scheme"), t_end=t_end,
                         cfl=cfg.get("stepper", "cfl"),
                         checkpoint_every=cfg.get("stepper", "checkpoint_every"),
                         ledger_every=cfg.get("stepper", "ledger_every"),
                         bo_only=cfg.get("stepper", "bo_only"),
                         track_radius=cfg.get("stepper", "track_radius"))
    integ = Integrator(grid, model, scfg)

    out = _output_dir(cfg, cfg.get("initial", "preset"))
    out.mkdir(parents=True, exist_ok=True)
    run = integ.start(wbar, A, tau0, t0)

    audit_every = cfg.get("output", "audit_every")
    bounds = []

    def sample_bounds(r):
        s = r.state
        bounds.append((s.t, audit_lemma_bounds(grid, s.wbar, s.A, s.t, r.tau,
                                               model.norm_params(r.tau), switches=switches)))

    if audit_every and not scfg.bo_only:
        sample_bounds(run)
    on_step = (lambda r: sample_bounds(r) if r.step % audit_every == 0 else None) \
        if audit_every and not scfg.bo_only else None
    on_ck = lambda r: _write_checkpoint(out / f"checkpoint_{r.step:06d}.tdk", r, model, grid)
    result = integ.run_to_end(run, on_checkpoint=on_ck, on_step=on_step)
    final = result.run
    _write_checkpoint(out / "final.tdk", final, model, grid)
    result.ledger.to_csv(out / "ledger.csv")

    cols = result.ledger.as_arrays()
    report = None
    if cols["t"].size >= 3:
        report = build_report(cols, bounds)
        report.write(out / "audit.csv", out / "audit.json")

    checks = {}
    if certified:
        checks["E_le_2E0"] = bool(np.all(cols["E"] <= 2 * chosen["E0"]))
        checks["tau_ge_half_tau0"] = bool(np.all(cols["tau"] >= tau0 / 2))
    if preset.exact is not None and result.reason == "t_end":
        we, Ae = preset.exact(final.state.t)
        checks["error_wbar_max"] = float(np.max(np.abs(final.state.wbar - we)))
        checks["error_A_physical_max"] = float(np.max(np.abs(
            sp.inverse_transform(grid, final.state.A) - sp.inverse_transform(grid, Ae))))

    manifest = {
        "version": __version__,
        "config": cfg.to_ini(),
        "preset": preset.name,
        "preset_info": preset.info,
        "certified": certified,
        "chosen_parameters": chosen,
        "model": {"r": model.r, "delta": model.delta, "eps": model.eps, "tau0": tau0,
                  "nonlinear": switches.nonlinear, "coupling": switches.coupling},
        "dt_effective": integ.dt,
        "n_steps": final.step,
        "scheme": cfg.get("stepper", "scheme"),
        "scheme_notes": SCHEME_NOTES,
        "constants": {"C0_tilde": cfg.get("model", "C0_tilde"), **model_cfg},
        "caveat": CAVEAT,
        "soliton_sign_convention": "amplitude and speed sign chosen by smallest travelling residual",
        "termination": result.reason,
        "max_cfl": final.max_cfl,
        "checks": checks,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")

    print(f"run finished: {result.reason} at t = {final.state.t:.6g} ({final.step} steps)")
    for k, v in checks.items():
        print(f"  {k}: {v}")
    if result.reason == "blow-up":
        print(f"blow-up: {result.error}", file=sys.stderr)
        return EXIT_BLOWUP
    if result.reason == "radius-exhausted":
        print(f"radius exhausted: {result.error}", file=sys.stderr)
        return EXIT_RADIUS
    return EXIT_OK


def cmd_audit(args) -> int:
    run_dir = Path(args.output or os.environ.get(OUTPUT_ENV) or ".")
    manifest = json.loads((run_dir / "manifest.json").read_text())
    led = EnergyLedger.from_csv(run_dir / "ledger.csv", manifest["model"]["eps"])
    report = build_report(led.as_arrays())
    report.write(run_dir / "audit.csv", run_dir / "audit.json")
    for rec in report.identities:
        print(f"{rec.name}: max residual {rec.max_residual:.3e}, max oddness {rec.max_oddness:.1e}")
    return EXIT_OK


def cmd_bo(args) -> int:
    args.preset = "bo-soliton"
    return cmd_run(args)


def cmd_blasius(args) -> int:
    prof = blasius_solve(eta_max=args.eta_max)
    check = blasius_solve(eta_max=args.eta_max, h=0.005)
    print(f"f''(0) = {prof.fpp0:.12f}")
    print(f"step-halved f''(0) = {check.fpp0:.12f}")
    print(f"displacement eta - f = {prof.displacement:.10f}")
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        np.savetxt(out / "blasius.csv", np.column_stack([prof.eta, prof.f, prof.fp, prof.fpp]),
                   delimiter=",", header="eta,f,fp,fpp", comments="", fmt="%.17g")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    if not 0 < args.nu < 1:
        raise ConfigurationError("nu must lie in (0, 1)")
    if args.resume:
        ck = ckpt.read(args.resume)
        grid = sp.Grid(ck.n_modes, ck.L_x, ck.n_y, ck.y_max)
        state = DeckState(ck.wbar, ck.A, ck.t, ck.eps)
    else:
        grid = sp.Grid()
        w, A = deck_state(grid)
        state = DeckState(w, A, 0.0, 1.0 / 64)
    prof = blasius_solve()
    comp = reconstruct(grid, state, prof, args.nu)
    slope, errs = matching_slope(grid, state, prof)
    print(f"matching slope {slope:.4f} (prediction 0.125); errors {errs}")
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        fields = {f"{deck}_{k}": np.asarray(v) for deck in ("lower", "main", "upper")
                  for k, v in getattr(comp, deck).items() if not k.startswith("_")}
        np.savez(out / "decks.npz", x=comp.x, X=comp.X, nu=comp.nu, **fields)
    return EXIT_OK


def cmd_selftest(args) -> int:
    return EXIT_OK if run_all() else EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--output", metavar="DIR")
    common.add_argument("--threads", type=int, default=1, metavar="N")
    common.add_argument("--certified", action="store_true")
    common.add_argument("--preset", metavar="NAME")
    common.add_argument("--resume", metavar="CHECKPOINT")

    p = argparse.ArgumentParser(prog="tripledeck", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="integrate the coupled system").set_defaults(func=cmd_run)
    sub.add_parser("audit", parents=[common], help="recompute identity audits of a run directory").set_defaults(func=cmd_audit)
    sub.add_parser("bo", parents=[common], help="unforced Benjamin-Ono soliton run").set_defaults(func=cmd_bo)
    b = sub.add_parser("blasius", parents=[common], help="solve the Blasius profile")
    b.add_argument("--eta-max", type=float, default=12.0)
    b.set_defaults(func=cmd_blasius)
    r = sub.add_parser("reconstruct", parents=[common], help="three-deck physical fields")
    r.add_argument("--nu", type=float, default=1e-3)
    r.set_defaults(func=cmd_reconstruct)
    sub.add_parser("selftest", parents=[common], help="quick property checks").set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    sp.set_workers(args.threads)
    try:
        return args.func(args)
    except (ConfigurationError, FileNotFoundError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except CorruptCheckpointError as e:
        print(f"corrupt checkpoint: {e}", file=sys.stderr)
        return EXIT_CORRUPT
    except BlowUpError as e:
        print(f"blow-up: {e}", file=sys.stderr)
        return EXIT_BLOWUP
    except RadiusExhaustedError as e:
        print(f"radius exhausted: {e}", file=sys.stderr)
        return EXIT_RADIUS
    except TripleDeckError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
