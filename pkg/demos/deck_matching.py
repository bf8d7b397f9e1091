"""Assemble lower, main and upper deck fields and measure the matching order.

The lower-deck outer limit and the main-deck inner limit should differ by
O(nu^{1/8}) at a fixed lower-deck height.
"""

from tripledeck import DeckState, Grid
from tripledeck.decks import blasius_solve, cauchy_riemann_residual, matching_slope, reconstruct
from tripledeck.presets import deck_state

prof = blasius_solve()
print(f"Blasius f''(0) = {prof.fpp0:.10f}, displacement = {prof.displacement:.6f}")

grid = Grid()
w, A = deck_state(grid, peak=0.6)
state = DeckState(w, A, 0.0, 1.0 / 64)
comp = reconstruct(grid, state, prof, nu=1e-3)
print(f"upper-deck Cauchy-Riemann residual {cauchy_riemann_residual(grid, comp):.2e}")

slope, errs = matching_slope(grid, state, prof)
for nu, e in zip((1e-2, 1e-3, 1e-4), errs):
    print(f"nu = {nu:.0e}  matching error {e:.4e}")
print(f"fitted slope {slope:.4f} against the predicted 1/8")
