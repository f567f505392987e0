"""
Choosing the degrees and the error family
=========================================

The sieve degrees and the error-family parameter are picked together by
an information-criterion sweep.  Scenario a2 generates proportional-odds
data (logistic errors, r = 1), so a well-behaved selector should land on
r = 1 rather than the proportional-hazards end of the family.
"""

import os

import numpy as np

from fttm import DEFAULT_R_GRID, ScenarioConfig, generate, grid_search

out_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), "output")
os.makedirs(out_dir, exist_ok=True)

ds, truth = generate(ScenarioConfig("a2", n=300, seed=3))
print(f"n = {ds.n}, events = {ds.n_events}, true family logarithmic(1)")

# A compact degree grid crossed with the default family grid.  Each cell
# is one maximum-likelihood fit; the best cell minimizes the criterion,
# with ties broken toward fewer parameters and smaller r.
best, table = grid_search(ds, n0_grid=(4, 7, 10, 13), n1_grid=(3, 5), r_grid=DEFAULT_R_GRID)

print(f"{len(table)} cells fitted; winner:")
print(
    f"  degrees ({best.spec.n0}, {best.spec.n1}), family "
    f"{best.spec.error.kind}({best.spec.error.param:g}), aic {best.aic:.2f}"
)

# The full sweep, sorted by the criterion, makes the margin visible.
cells = sorted(table, key=lambda cell: cell.aic)
print("top five cells:")
for cell in cells[:5]:
    print(
        f"  n0 {cell.n0:2d}, n1 {cell.n1}, r {cell.r:4.2f}: "
        f"aic {cell.aic:8.2f}, converged {cell.converged}"
    )

rows = np.array([[c.n0, c.n1, c.r, c.loglik, c.aic, float(c.converged)] for c in table])
np.savetxt(
    os.path.join(out_dir, "aic_sweep.csv"),
    rows,
    delimiter=",",
    header="n0,n1,r,loglik,aic,converged",
    comments="",
)

# How much worse is the misspecified proportional-hazards end?  Compare
# the best r = 0 cell with the winner.
ph_cells = [c for c in table if c.r == 0.0]
ph_best = min(ph_cells, key=lambda cell: cell.aic)
print(
    f"best r = 0 cell trails the winner by {ph_best.aic - best.aic:.1f} "
    "criterion points"
)
print(f"wrote aic_sweep.csv to {out_dir}")
