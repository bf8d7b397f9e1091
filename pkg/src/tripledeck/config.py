"""Run configuration: an INI file with [grid], [model], [stepper], [initial], [output].

Precedence: built-in defaults < preset defaults < config file < command line.
Unknown sections or keys are configuration errors.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field

from .errors import ConfigurationError

_FLOAT, _INT, _BOOL, _STR = float, int, bool, str

SCHEMA = {
    "grid": {"n_modes": _INT, "L_x": _FLOAT, "n_y": _INT, "y_max": _FLOAT},
    "model": {"tau0": _FLOAT, "r": _FLOAT, "delta": _FLOAT, "eps": _FLOAT,
              "C0_tilde": _FLOAT, "C1": _FLOAT, "C2": _FLOAT,
              "nonlinear": _BOOL, "coupling": _BOOL},
    "stepper": {"dt": _FLOAT, "scheme": _STR, "t_end": _FLOAT, "certified": _BOOL,
                "cfl": _FLOAT, "checkpoint_every": _INT, "ledger_every": _INT,
                "bo_only": _BOOL, "track_radius": _BOOL, "min_steps": _INT},
    "initial": {"preset": _STR, "file": _STR, "soliton_c": _FLOAT},
    "output": {"directory": _STR, "audit_every": _INT},
}

DEFAULTS = {
    "grid": {"n_modes": 64, "L_x": 20.0, "n_y": 256, "y_max": 12.0},
    "model": {"tau0": 1.0, "r": 2.5, "C0_tilde": 1.0, "C1": 1.0, "C2": 1.0,
              "nonlinear": True, "coupling": True},
    "stepper": {"dt": 2e-4, "scheme": "CNAB2", "t_end": 0.01, "certified": False,
                "cfl": 0.5, "checkpoint_every": 0, "ledger_every": 1,
                "bo_only": False, "track_radius": True, "min_steps": 16},
    "initial": {"preset": "small-data-certified", "soliton_c": 0.3},
    "output": {"audit_every": 50},
}

PRESET_DEFAULTS = {
    "small-data-certified": {"stepper": {"certified": True}},
    "bo-soliton": {
        "grid": {"n_modes": 512, "L_x": 40.0, "n_y": 16, "y_max": 8.0},
        "model": {"coupling": False},
        "stepper": {"dt": 1e-3, "t_end": 1.0, "bo_only": True, "track_radius": False},
        "output": {"audit_every": 0},
    },
    "heat-column": {
        "grid": {"n_modes": 8, "n_y": 512},
        "model": {"nonlinear": False, "coupling": False},
        "stepper": {"dt": 1e-4, "t_end": 0.1, "track_radius": False},
        "output": {"audit_every": 0},
    },
    "manufactured-convergence": {
        "stepper": {"dt": 2e-3, "t_end": 0.2, "track_radius": False},
        "output": {"audit_every": 0},
    },
}


def _parse(kind, raw: str, where: str):
    try:
        if kind is bool:
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return kind(raw.strip())
    except ValueError:
        raise ConfigurationError(f"{where}: cannot parse {raw!r} as {kind.__name__}") from None


@dataclass
class RunConfig:
    values: dict = field(default_factory=dict)
    explicit: set = field(default_factory=set)   # (section, key) set by file or flags

    def get(self, section: str, key: str, default=None):
        return self.values.get(section, {}).get(key, default)

    def set(self, section: str, key: str, value, explicit: bool = True) -> None:
        if section not in SCHEMA or key not in SCHEMA[section]:
            raise ConfigurationError(f"unknown config key [{section}] {key}")
        self.values.setdefault(section, {})[key] = value
        if explicit:
            self.explicit.add((section, key))

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        for sec in SCHEMA:
            items = self.values.get(sec, {})
            cp[sec] = {k: _fmt(items[k]) for k in SCHEMA[sec] if k in items}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def read_ini(text: str) -> dict:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigurationError(f"malformed config: {e}") from None
    out = {}
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigurationError(f"unknown config section [{sec}]")
        for key, raw in cp[sec].items():
            if key not in SCHEMA[sec]:
                raise ConfigurationError(f"unknown config key [{sec}] {key}")
            out.setdefault(sec, {})[key] = _parse(SCHEMA[sec][key], raw, f"[{sec}] {key}")
    return out


def build_config(text: str | None = None, preset: str | None = None,
                 certified: bool | None = None, output: str | None = None) -> RunConfig:
    cfg = RunConfig()
    for sec, items in DEFAULTS.items():
        for k, v in items.items():
            cfg.set(sec, k, v, explicit=False)
    filed = read_ini(text) if text else {}
    name = preset or filed.get("initial", {}).get("preset") or DEFAULTS["initial"]["preset"]
    if name not in PRESET_DEFAULTS:
        raise ConfigurationError(f"unknown preset {name!r}; choose from {sorted(PRESET_DEFAULTS)}")
    for sec, items in PRESET_DEFAULTS[name].items():
        for k, v in items.items():
            cfg.set(sec, k, v, explicit=False)
    for sec, items in filed.items():
        for k, v in items.items():
            cfg.set(sec, k, v)
    cfg.set("initial", "preset", name, explicit=preset is not None or ("initial", "preset") in cfg.explicit)
    if certified is not None:
        cfg.set("stepper", "certified", certified)
    if output is not None:
        cfg.set("output", "directory", output)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if cfg.get("model", "r") <= 2:
        raise ConfigurationError("r must exceed 2")
    if cfg.get("model", "tau0") <= 0:
        raise ConfigurationError("tau0 must be positive")
    for k in ("C0_tilde", "C1", "C2"):
        if cfg.get("model", k) < 1:
            raise ConfigurationError(f"{k} must be >= 1")
    if cfg.get("stepper", "dt") <= 0:
        raise ConfigurationError("dt must be positive")
    if cfg.get("stepper", "t_end") < 0:
        raise ConfigurationError("t_end must be nonnegative")
    if cfg.get("stepper", "scheme") not in ("CNAB2", "IMEX-RK2"):
        raise ConfigurationError("scheme must be CNAB2 or IMEX-RK2")
    if cfg.get("stepper", "certified"):
        for sec, key in (("model", "delta"), ("model", "eps"), ("stepper", "t_end")):
            if (sec, key) in cfg.explicit:
                raise ConfigurationError(
                    f"certified mode chooses {key} itself; remove [{sec}] {key}")
