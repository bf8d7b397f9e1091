"""Carry a Benjamin-Ono travelling wave across the torus with the wall layer frozen.

Prints the profile error against the exact translate and the drift of the
conserved mean and mass at a few times.
"""

import numpy as np

from tripledeck import Grid, Integrator, ModelParams, StepperConfig
from tripledeck import spectral as sp
from tripledeck.benjamin_ono import bo_invariants
from tripledeck.presets import soliton

grid = Grid(512, 40.0, 16, 8.0)
pre = soliton(grid, c=0.3)
model = ModelParams(switches=pre.switches)
base = bo_invariants(grid, pre.A)

for t_end in (0.25, 0.5, 1.0):
    cfg = StepperConfig(dt=1e-3, t_end=t_end, bo_only=True, track_radius=False)
    integ = Integrator(grid, model, cfg)
    res = integ.run_to_end(integ.start(pre.wbar, pre.A, tau0=1.0))
    A = res.run.state.A
    _, A_exact = pre.exact(t_end)
    err = np.max(np.abs(sp.inverse_transform(grid, A - A_exact)))
    inv = bo_invariants(grid, A)
    print(f"t = {t_end:4.2f}  Linf error {err:.2e}  "
          f"mean drift {abs(inv['mean'] - base['mean']):.1e}  "
          f"mass drift {abs(inv['l2_mass'] - base['l2_mass']):.1e}")
