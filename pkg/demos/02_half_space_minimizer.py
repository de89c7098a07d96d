"""Minimizing the unit-scale energy on a truncated half-space.

Boundary data 1 + h on the flat face with a nonnegative bump h pushes the
minimizer above 1; an explicit exponential barrier caps it from above, the
energy of any admissible extension caps the minimal energy, and strong
monotonicity makes the solution independent of the starting guess.
"""

import numpy as np

from phaselab import (
    ScalarField,
    SolveConfig,
    comparison_check,
    half_space_energy,
    make_half_space_grid,
    solve_half_space,
    standard_potential,
    uniqueness_check,
)
from phaselab.solver import boundary_extension

grid, _ = make_half_space_grid(2, 8.0, 0.125, 1.0)
x = grid.axis_coords(0)

# h = 2 * (half-amplitude exponential bump), so h <= exp(-|x|) pointwise.
r = np.abs(x)
base = np.where(r < 6.0,
                0.5 * np.exp(-r) * np.exp(1 - 1 / (1 - np.minimum(r / 6, 0.999) ** 2)),
                0.0)
h = 2.0 * base

cfg = SolveConfig(residual_tol=1e-8)
res = solve_half_space(h, 1.0, standard_potential(), grid, cfg)
print(f"converged: residual {res.residual:.1e} in {res.iterations} steps")
print(f"F(minimizer) = {res.final_energy:.5f}")

ext = ScalarField(grid, boundary_extension(grid, 1.0 + h, 1.0),
                  res.field.roles)
print(f"F(extension) = {half_space_energy(ext):.5f}  (upper bound)")

envelope = 1.0 + np.exp(-grid.node_radii())
excess = np.max(res.field.values - envelope - 2 * grid.spacing)
print(f"barrier 1 + e^-|x|: worst excess {excess:.2e} (<= 0 means capped)")
print(f"minimum of the field: {res.field.values.min():.9f} (stays >= 1)")

uq = uniqueness_check(h, standard_potential(), grid, cfg)
print(f"uniqueness check: {uq.status}, sup difference {uq.sup_difference:.2e}")

# scaling comparison: the theta-fold data sits below 1 + theta (u_1 - 1)
rep = comparison_check(4.0, base, standard_potential(), grid, cfg)
print(f"comparison bound at theta=4: worst violation {rep.max_violation:.2e} "
      f"(tolerance {rep.tolerance:.2e})")
