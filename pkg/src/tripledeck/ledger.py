"""Time series of norms, radius, energy and audited terms."""

from __future__ import annotations

import io
import math

import numpy as np

from .audit import identity_residuals

CSV_COLUMNS = [
    "t", "tau", "X", "Y", "Z", "H", "E", "Gamma1", "Gamma2",
    "T_A1", "T_A2", "T_N", "T_L", "T_M", "T_B",
    "T_dyN", "T_dyL", "T_dyM", "T_dyB",
    "residual_A", "residual_w", "residual_vort",
]

# appended after the fixed schema; the identity audits are rebuilt from these
AUX_COLUMNS = [
    "eA", "dA", "eW", "dW", "linW", "dampW",
    "eV", "dV", "linV", "dampV",
    "TdN_d", "TdL_d", "TdM_d", "TdB_d",
    "odd_w", "odd_v", "mean", "l2_mass", "gamma_int",
]

COLUMNS = CSV_COLUMNS + AUX_COLUMNS


class EnergyLedger:
    """Append-only table with a running total energy.

    ``E`` in row n is the energy over the window [t_0, t_n]: the running
    sup of X^2 plus trapezoid integrals of Y^2, Z^2/16 and H^2/(64 eps).
    """

    def __init__(self, eps: float):
        self.eps = eps
        self.rows: list[dict] = []
        self._sup = 0.0
        self._integral = 0.0

    def __len__(self):
        return len(self.rows)

    def append(self, row: dict) -> None:
        if self.rows and not row["t"] > self.rows[-1]["t"]:
            raise ValueError("ledger timestamps must increase")
        dens = row["Y"] ** 2 + row["Z"] ** 2 / 16.0 + row["H"] ** 2 / (64.0 * self.eps)
        if self.rows:
            prev = self.rows[-1]
            self._integral += 0.5 * (dens + prev["_dens"]) * (row["t"] - prev["t"])
        self._sup = max(self._sup, row["X"] ** 2)
        full = {c: math.nan for c in COLUMNS}
        full.update(row)
        full["_dens"] = dens
        full["E"] = self._sup + self._integral
        self.rows.append(full)

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.rows], dtype=float)

    def as_arrays(self) -> dict:
        return {c: self.column(c) for c in COLUMNS}

    def finalize(self) -> None:
        """Fill the identity residual columns (interior rows only)."""
        res = identity_residuals(self.as_arrays())
        for name, vals in res.items():
            for row, v in zip(self.rows, vals):
                row[name] = float(v)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        buf.write(",".join(COLUMNS) + "\n")
        for r in self.rows:
            buf.write(",".join(_fmt(r[c]) for c in COLUMNS) + "\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="\n") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, path, eps: float) -> "EnergyLedger":
        led = cls(eps)
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            for line in fh:
                vals = [float(v) for v in line.strip().split(",")]
                row = dict(zip(header, vals))
                row["_dens"] = row["Y"] ** 2 + row["Z"] ** 2 / 16 + row["H"] ** 2 / (64 * eps)
                led.rows.append(row)
        return led


def _fmt(v: float) -> str:
    return "nan" if v != v else repr(float(v))
