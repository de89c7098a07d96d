import math

import numpy as np
import pytest

from phaselab.energy import (
    ScalarField,
    half_space_energy,
    standard_potential,
)
from phaselab.grid import make_half_space_grid
from phaselab.solver import (
    InvalidBoundaryError,
    NonConvergenceError,
    SolveConfig,
    boundary_extension,
    comparison_check,
    residual_field,
    solve_half_space,
    uniqueness_check,
)

P = standard_potential()


def exp_base(xs, amp=0.5, support=6.0):
    r = np.abs(xs)
    out = np.zeros_like(r)
    ins = r < support
    t = (r[ins] / support) ** 2
    out[ins] = amp * np.exp(-r[ins]) * np.exp(1.0 - 1.0 / (1.0 - t))
    return out


def exact_1d_energy(v0):
    """Closed form of the half-line energy for trace 1 + v0: the optimal
    profile satisfies v' = -v (2 + v)/sqrt(2), so F = (v0^2 + v0^3/3)/sqrt(2)."""
    return (v0 ** 2 + v0 ** 3 / 3.0) / math.sqrt(2.0)


def exact_1d_profile(v0, x):
    q = v0 / (v0 + 2.0) * np.exp(-math.sqrt(2.0) * x)
    return 1.0 + 2.0 * q / (1.0 - q)


def test_zero_data_constant_minimizer():
    g, _ = make_half_space_grid(1, 8.0, 0.125, 1.0)
    res = solve_half_space(np.asarray(0.0), 1.0, P, g, SolveConfig())
    assert res.iterations == 0
    assert res.final_energy == 0.0
    assert np.array_equal(res.field.values, np.ones(g.shape))


@pytest.mark.parametrize("v0", [0.5, 2.0])
def test_1d_pointwise_oracle(v0):
    g, _ = make_half_space_grid(1, 16.0, 1 / 64, 1.0)
    res = solve_half_space(np.asarray(v0), 1.0, P, g,
                           SolveConfig(residual_tol=1e-10))
    exact = exact_1d_profile(v0, g.axis_coords(0))
    assert np.max(np.abs(res.field.values - exact)) <= 2e-3 * v0 ** 2
    assert res.residual <= 1e-10


def test_1d_energy_converges_to_exact():
    v0 = 2.0
    errs = []
    for div in (32, 64, 128):
        g, _ = make_half_space_grid(1, 16.0, 1.0 / div, 1.0)
        res = solve_half_space(np.asarray(v0), 1.0, P, g,
                               SolveConfig(residual_tol=1e-10))
        errs.append(abs(res.final_energy - exact_1d_energy(v0)))
    assert errs[2] < errs[1] < errs[0]
    # the quadrature bias is first order in the spacing
    assert errs[2] <= 0.6 * errs[1]


def test_monotone_energy_trace():
    g, _ = make_half_space_grid(2, 6.0, 0.125, 1.0)
    h = 2.0 * exp_base(g.axis_coords(0))
    res = solve_half_space(h, 1.0, P, g, SolveConfig(residual_tol=1e-9))
    tr = np.asarray(res.energy_trace)
    slack = 10 * np.finfo(float).eps * np.maximum(1.0, np.abs(tr[:-1]))
    assert np.all(np.diff(tr) <= slack)


def test_boundary_nodes_pinned_exactly():
    g, _ = make_half_space_grid(2, 6.0, 0.25, 1.0)
    h = exp_base(g.axis_coords(0))
    res = solve_half_space(h, 1.0, P, g, SolveConfig())
    u = res.field.values
    assert np.array_equal(u[:, 0], 1.0 + h)
    assert np.all(u[:, -1] == 1.0)
    assert np.all(u[0, :] == 1.0)
    assert np.all(u[-1, :] == 1.0)


def test_range_preservation_and_envelope():
    g, _ = make_half_space_grid(2, 8.0, 0.125, 1.0)
    h = 2.0 * exp_base(g.axis_coords(0))      # 0 <= h <= e^-|x|
    cfg = SolveConfig(residual_tol=1e-8)
    res = solve_half_space(h, 1.0, P, g, cfg)
    u = res.field.values
    assert u.min() >= 1.0 - cfg.residual_tol
    envelope = 1.0 + np.exp(-g.node_radii()) + 2.0 * g.spacing
    assert np.max(u - envelope) <= 0.0


def test_energy_bound_against_extension():
    g, _ = make_half_space_grid(2, 6.0, 0.125, 1.0)
    h = 2.0 * exp_base(g.axis_coords(0))
    res = solve_half_space(h, 1.0, P, g, SolveConfig())
    ext = ScalarField(g, boundary_extension(g, 1.0 + h, 1.0), res.field.roles)
    assert res.final_energy <= half_space_energy(ext)


def test_residual_field_trivial_and_contract():
    g, _ = make_half_space_grid(2, 6.0, 0.25, 1.0)
    ones = ScalarField.from_values(g, np.ones(g.shape))
    assert not residual_field(ones, P).values.any()
    h = exp_base(g.axis_coords(0))
    cfg = SolveConfig(residual_tol=1e-8)
    res = solve_half_space(h, 1.0, P, g, cfg)
    r = residual_field(res.field, P)
    assert np.max(np.abs(r.values)) <= cfg.residual_tol
    # faces excluded
    assert not r.values[:, 0].any() and not r.values[0, :].any()


def test_residual_supersolution_sign():
    # the explicit barrier is a discrete supersolution away from the origin:
    # -lap(psi) + W'(psi) >= -O(h^2)
    from phaselab.grid import Grid
    from phaselab.energy import barrier_profile
    g = Grid((61, 61), 0.1, (1.0, 1.0))
    psi, _, _ = barrier_profile(g)
    u = ScalarField.from_values(g, psi)
    r = residual_field(u, P).values[1:-1, 1:-1]
    assert r.min() >= -1e-3


def test_uniqueness_checks():
    g, _ = make_half_space_grid(2, 6.0, 0.25, 1.0)
    x = g.axis_coords(0)
    assert uniqueness_check(np.zeros(g.shape[0]), P, g, SolveConfig())
    rep = uniqueness_check(2.0 * exp_base(x), P, g,
                           SolveConfig(residual_tol=1e-9))
    assert rep.status == "unique"
    assert rep.sup_difference <= rep.tolerance
    signed = exp_base(x) * np.sign(np.sin(3 * x))
    rep2 = uniqueness_check(signed, P, g, SolveConfig())
    assert rep2.status == "not_applicable"
    assert not rep2


def test_comparison_check():
    g, _ = make_half_space_grid(2, 6.0, 0.125, 1.0)
    h = exp_base(g.axis_coords(0))
    cfg = SolveConfig(residual_tol=1e-9)
    r1 = comparison_check(1.0, h, P, g, cfg)
    assert r1.passed
    assert abs(r1.max_violation) <= r1.tolerance
    r4 = comparison_check(4.0, h, P, g, cfg)
    assert r4.passed
    assert r4.max_violation <= r4.tolerance
    # decay transfer evaluated for enveloped data
    assert r4.decay_max_violation is not None
    assert r4.decay_max_violation <= 0.0
    with pytest.raises(ValueError):
        comparison_check(0.5, h, P, g, cfg)


def test_non_convergence_flags_best_iterate():
    g, _ = make_half_space_grid(2, 6.0, 0.25, 1.0)
    h = 6.0 * exp_base(g.axis_coords(0))
    with pytest.raises(NonConvergenceError) as err:
        solve_half_space(h, 1.0, P, g,
                         SolveConfig(residual_tol=1e-12, max_iterations=1,
                                     newton_burn_in=5))
    best = err.value.result
    assert not best.converged
    assert best.residual > 1e-12
    assert best.field.values.shape == g.shape


def test_invalid_boundary():
    g, _ = make_half_space_grid(2, 6.0, 0.25, 1.0)
    bad = np.full(g.shape[0], np.nan)
    with pytest.raises(InvalidBoundaryError):
        solve_half_space(bad, 1.0, P, g, SolveConfig())
    with pytest.raises(InvalidBoundaryError):
        solve_half_space(np.zeros(5), 1.0, P, g, SolveConfig())


def test_truncation_stability():
    # doubling the truncation radius moves the energy by less than the
    # explicit tail bound plus 1% relative
    from phaselab.grid import tail_bound
    theta = 2.0
    cfg = SolveConfig(residual_tol=1e-10)
    energies = {}
    for R in (6.0, 12.0):
        g, _ = make_half_space_grid(1, R, 1 / 32, 1.0)
        res = solve_half_space(np.asarray(theta * 0.5), 1.0, P, g, cfg)
        energies[R] = res.final_energy
    change = abs(energies[12.0] - energies[6.0])
    allowance = tail_bound(1, 6.0, theta) + 0.01 * energies[6.0]
    assert change <= allowance
