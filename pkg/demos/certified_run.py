"""Small-data certified run: pick (delta, eps, T*) from E0 and watch the ledger.

The energy must stay below 2 E0 and the radius above tau0 / 2 on [0, T*].
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from tripledeck.cli import main
from tripledeck.ledger import EnergyLedger

with tempfile.TemporaryDirectory() as d:
    code = main(["run", "--preset", "small-data-certified", "--output", d])
    manifest = json.loads((Path(d) / "manifest.json").read_text())
    chosen = manifest["chosen_parameters"]
    cols = EnergyLedger.from_csv(Path(d) / "ledger.csv", chosen["eps"]).as_arrays()

print(f"exit code {code}")
print(f"E0 = {chosen['E0']:.3e}  delta = {chosen['delta']:.4g}  eps = {chosen['eps']:.4g}  "
      f"T* = {chosen['T_star']:.4g}")
print(f"max E / E0 = {np.max(cols['E']) / chosen['E0']:.3f}")
print(f"min tau / tau0 = {np.min(cols['tau']):.5f}")
