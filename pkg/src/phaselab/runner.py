"""Config-driven experiment orchestration.

Each named experiment reproduces one desk-scale construction as an
epsilon sweep, evaluates its defining assertions, and emits machine-
readable artifacts into the run directory:

* ``sweep.csv``      one row per epsilon (fixed column schema, see
                     ``CSV_COLUMNS``; reals in shortest round-trip form)
* ``fields/``        per-epsilon field files (JSON header + .npy samples)
* ``summary.json``   assertion records and the config echo
* ``summary.txt``    one pass/fail line per assertion
* ``manifest.json``  every emitted file with its SHA-256 hash

Runs are deterministic for a fixed (config, seed, platform); per-epsilon
work may run on a small thread pool (capped by the ``PHASELAB_WORKERS``
environment variable) while emission stays serialized in epsilon order.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass

import numpy as np

from .diagnostics import (
    boundary_layer_mass,
    concentration_scan,
    hausdorff_distance,
    hoelder_quotient,
    interior_region_mask,
    level_set,
    lp_norm,
)
from .energy import (
    ScalarField,
    c0,
    modica_mortola,
    standard_potential,
    willmore_eps,
)
from .families import EpsilonSchedule, build_family, neumann_layer_field
from .fieldio import save_field
from .grid import make_half_space_grid
from .solver import SolveConfig, solve_half_space

__all__ = [
    "EXPERIMENTS",
    "CSV_COLUMNS",
    "Assertion",
    "VerificationSummary",
    "validate",
    "run",
    "render_summary",
]

EXPERIMENTS = ("tanh_calibration", "unbounded", "boundary_atom",
               "hausdorff_levelset", "hoelder_blowup", "oscillation_atom",
               "neumann_layer", "penalty_zero")

CSV_COLUMNS = ("experiment", "n", "eps", "theta_or_omega", "F_unit", "S_eps",
               "W_eps", "F_eps_penalized", "sup_u", "mass_total", "mass_in_R1",
               "mass_in_R2", "mass_outside_Reps", "boundary_layer_mass",
               "hoelder_boundary", "hoelder_interior", "residual", "iterations")


@dataclass
class Assertion:
    """One verified claim: ``value <comparator> threshold``."""

    id: str
    description: str
    value: float
    comparator: str
    threshold: float
    passed: bool


def _check(aid, desc, value, comparator, threshold):
    value = float(value)
    ok = {"<=": value <= threshold, ">=": value >= threshold,
          "<": value < threshold, ">": value > threshold}[comparator]
    return Assertion(aid, desc, value, comparator, float(threshold), bool(ok))


@dataclass
class VerificationSummary:
    experiment: str
    assertions: list
    passed: bool

    @classmethod
    def of(cls, experiment, assertions):
        return cls(experiment, assertions, all(a.passed for a in assertions))


# --------------------------------------------------------------------------
# defaults and validation
# --------------------------------------------------------------------------

DEFAULTS = {
    "tanh_calibration": {
        "n": 1, "eps_list": [0.1],
        "params": {"domain_length": 10.0, "spacing_per_eps": 8,
                   "interface_position": 5.0},
    },
    "unbounded": {
        "n": 2, "eps_list": [0.1, 0.05, 0.025],
        "params": {"L": 0.5, "unit_spacing": 1 / 16, "theta_exponent": 0.125,
                   "base_amplitude": 3.0, "base_shape": "compact_bump",
                   "slope_window": [0.3, 0.7], "residual_tol": 1e-6},
    },
    "boundary_atom": {
        "n": 2, "eps_list": [0.2, 0.1, 0.05],
        "params": {"S": 1.0, "L": 1.0, "unit_spacing": 1 / 16,
                   "base_amplitude": 0.5, "base_support": 4.0,
                   "probe_radii": [0.25, 0.1], "residual_tol": 1e-6,
                   "concentration_radius": 0.25},
    },
    "hausdorff_levelset": {
        "n": 2, "eps_list": [0.1, 0.05, 0.025],
        "params": {"L": 0.5, "unit_spacing": 1 / 16, "level_band": 0.25,
                   "distance_factor": 8.0, "residual_tol": 1e-6},
    },
    "hoelder_blowup": {
        "n": 2, "eps_list": [0.2, 0.1, 0.05],
        "params": {"window": 12.0, "points_per_unit_scale": 6.0,
                   "gamma": 0.5, "interior_variation_tol": 0.2,
                   "residual_tol": 1e-6},
    },
    "oscillation_atom": {
        "n": 2, "eps_list": [0.1],
        "params": {"S_prime": 0.1, "delta": 0.15, "R": 2.0,
                   "unit_spacing": 1 / 128, "residual_tol": 1e-6},
    },
    "neumann_layer": {
        "n": 2, "eps_list": [0.064, 0.032, 0.016, 0.008],
        "params": {"L": 2.4, "interfaces": [0.7, 1.7], "bump_amp": 0.5,
                   "amp_power": 1.5, "exponent_floor": 1.8},
    },
    "penalty_zero": {
        "n": 2, "eps_list": [0.2, 0.1, 0.05],
        "params": {"S": 1.0, "L": 1.0, "unit_spacing": 1 / 16,
                   "base_amplitude": 0.5, "base_support": 4.0, "sigma": 1.0,
                   "offset_scale": 1e-3, "residual_tol": 1e-6},
    },
}


def expand_config(config: dict) -> dict:
    """Fill a sparse config with the experiment defaults (deep for params)."""
    name = config.get("experiment")
    base = DEFAULTS.get(name, {})
    out = {
        "experiment": name,
        "n": config.get("n", base.get("n", 2)),
        "eps_list": list(config.get("eps_list", base.get("eps_list", []))),
        "solver": {"residual_tol": 1e-9, "max_iterations": 400,
                   **config.get("solver", {})},
        "params": {**base.get("params", {}), **config.get("params", {})},
        "output_dir": config.get("output_dir", "runs/" + str(name)),
        "seed": int(config.get("seed", 0)),
        "workers": int(config.get("workers", 0)) or None,
    }
    return out


def validate(config: dict) -> list[str]:
    """Pure validation; returns a list of error messages (empty when ok)."""
    errors = []
    name = config.get("experiment")
    if name not in EXPERIMENTS:
        errors.append(f"experiment must be one of {EXPERIMENTS}, got {name!r}")
        return errors
    try:
        cfg = expand_config(config)
    except (TypeError, ValueError) as exc:
        return [f"config malformed: {exc}"]
    eps = cfg["eps_list"]
    if not eps:
        errors.append("eps_list must be non-empty")
    if any(e <= 0 or not math.isfinite(e) for e in eps):
        errors.append("eps values must be finite and positive")
    if len(eps) > 1 and not all(b < a for a, b in zip(eps, eps[1:])):
        errors.append("eps must be strictly decreasing")
    if cfg["n"] not in (1, 2, 3):
        errors.append(f"n must be 1, 2 or 3, got {cfg['n']}")
    sol = cfg["solver"]
    if sol.get("residual_tol", 0) <= 0:
        errors.append("solver.residual_tol must be positive")
    p = cfg["params"]
    if name == "oscillation_atom":
        from .energy import MAX_FLOOR_DELTA
        if not (0 < p["delta"] < MAX_FLOOR_DELTA):
            errors.append(
                f"oscillation_atom delta must lie in (0, {MAX_FLOOR_DELTA:.4f}) "
                "so the clamped potential keeps a monotone derivative; got "
                f"{p['delta']}")
        if p["S_prime"] <= 0:
            errors.append("oscillation_atom S_prime must be positive")
    if name == "hoelder_blowup" and not (0.0 < p.get("gamma", 0.5) <= 1.0):
        errors.append("gamma must lie in (0, 1]")
    if name in ("boundary_atom", "penalty_zero") and p.get("S", 1.0) <= 0:
        errors.append("S must be positive")
    if name == "penalty_zero" and p.get("sigma", 1.0) < 0:
        errors.append("sigma must be >= 0")
    for key in ("L", "unit_spacing", "window", "R"):
        if key in p and p[key] is not None and p[key] <= 0:
            errors.append(f"params.{key} must be positive")
    return errors


# --------------------------------------------------------------------------
# sweep rows
# --------------------------------------------------------------------------

def _row(experiment, n, eps, **kw):
    row = {c: "" for c in CSV_COLUMNS}
    row.update({"experiment": experiment, "n": n, "eps": eps})
    row.update(kw)
    return row


def _family_row(experiment, n, member, **extra):
    e = member.energy
    return _row(experiment, n, member.eps,
                theta_or_omega="" if member.parameter is None
                else member.parameter,
                F_unit=member.unit_result.final_energy,
                S_eps=e.S_eps, W_eps=e.W_eps,
                F_eps_penalized="" if e.F_eps_penalized is None
                else e.F_eps_penalized,
                sup_u=member.certificates["sup_u"],
                residual=member.unit_result.residual,
                iterations=member.unit_result.iterations,
                **extra)


# --------------------------------------------------------------------------
# experiments
# --------------------------------------------------------------------------

def _solver_cfg(cfg):
    return SolveConfig(residual_tol=cfg["solver"]["residual_tol"],
                       max_iterations=cfg["solver"]["max_iterations"])


def run_tanh_calibration(cfg):
    p = cfg["params"]
    eps = cfg["eps_list"][0]
    length = p["domain_length"]
    spacing = eps / p["spacing_per_eps"]
    x0 = p["interface_position"]

    gu, _ = make_half_space_grid(1, length / eps, spacing / eps, 1.0)
    y = gu.axis_coords(0)
    profile = np.tanh((y - x0 / eps) / math.sqrt(2.0))
    init = ScalarField.from_values(gu, profile)
    scfg = SolveConfig(residual_tol=1e-10 if eps >= 0.05 else 1e-9,
                       initial_guess="user", user_field=init)
    res = solve_half_space(np.asarray(profile[0] - 1.0), 1.0,
                           standard_potential(), gu, scfg)

    gp = gu.scaled(eps)
    raw = ScalarField(gp, np.tanh((gp.axis_coords(0) - x0)
                                  / (math.sqrt(2.0) * eps)), res.field.roles)
    relaxed = ScalarField(gp, res.field.values, res.field.roles)
    S_raw = modica_mortola(raw, eps)
    W_raw = willmore_eps(raw, eps)
    S_rel = modica_mortola(relaxed, eps)
    W_rel = willmore_eps(relaxed, eps)

    assertions = [
        _check("calibration.s_eps_sampled",
               "diffuse perimeter of the sampled optimal profile is 1",
               S_raw, "<=", 1.01),
        _check("calibration.s_eps_sampled_lo", "sampled perimeter lower bound",
               S_raw, ">=", 0.99),
        _check("calibration.s_eps_relaxed",
               "diffuse perimeter of the relaxed stationary profile",
               S_rel, "<=", 1.01),
        _check("calibration.s_eps_relaxed_lo", "relaxed perimeter lower bound",
               S_rel, ">=", 0.99),
        _check("calibration.w_eps",
               "curvature energy of the stationary profile is numerically zero",
               W_rel, "<=", 1e-4),
    ]
    rows = [_row("tanh_calibration", 1, eps, F_unit=res.final_energy,
                 S_eps=S_rel, W_eps=W_rel, sup_u=float(relaxed.values.max()),
                 residual=res.residual, iterations=res.iterations),
            _row("tanh_calibration", 1, eps, theta_or_omega="sampled",
                 S_eps=S_raw, W_eps=W_raw, sup_u=float(raw.values.max()))]
    fields = [("calibration_relaxed", relaxed), ("calibration_sampled", raw)]
    return rows, assertions, fields


def run_unbounded(cfg):
    p = cfg["params"]
    n = cfg["n"]
    eps_list = cfg["eps_list"]
    thetas = {e: e ** (-p["theta_exponent"]) for e in eps_list}
    sched = EpsilonSchedule(tuple(eps_list), theta_of_eps=thetas)
    fam = build_family("unbounded", sched, {
        "n": n, "L": p["L"], "unit_spacing": p["unit_spacing"],
        "base_shape": p["base_shape"], "base_amplitude": p["base_amplitude"],
        "residual_tol": p["residual_tol"],
    }, cfg=_solver_cfg(cfg), workers=cfg["workers"])

    sups = [lp_norm(m.field, "inf") for m in fam.members]
    S = [m.energy.S_eps for m in fam.members]
    W = [m.energy.W_eps for m in fam.members]
    peak = fam.members[0].certificates["base_peak"]
    slope = float(np.polyfit(np.log(eps_list), np.log(S), 1)[0])
    lo, hi = p["slope_window"]

    assertions = [
        _check("unbounded.sup_increasing",
               "sup-norms grow strictly along the sweep",
               min(np.diff(sups)), ">", 0.0),
        _check("unbounded.sup_floor",
               "each sup-norm clears 1 + theta/2 times the base peak",
               min(s - (1 + thetas[e] / 2 * peak)
                   for s, e in zip(sups, eps_list)), ">=", 0.0),
        _check("unbounded.mass_decreasing",
               "diffuse masses decrease strictly",
               max(np.diff(S)), "<", 0.0),
        _check("unbounded.mass_slope_hi",
               "log-log mass slope against eps stays in the window",
               slope, "<=", hi),
        _check("unbounded.mass_slope_lo", "mass slope lower edge",
               slope, ">=", lo),
        _check("unbounded.willmore_zero",
               "curvature energy vanishes for every member",
               max(W), "<=", 1e-6),
    ]
    rows = [_family_row("unbounded", n, m, mass_total=m.energy.S_eps)
            for m in fam.members]
    fields = [(f"unbounded_eps{i}", m.field)
              for i, m in enumerate(fam.members)]
    return rows, assertions, fields


def _boundary_atom_family(cfg, sigma=None, offsets=None):
    p = cfg["params"]
    sched = EpsilonSchedule(tuple(cfg["eps_list"]))
    return build_family("boundary_atom", sched, {
        "n": cfg["n"], "S": p["S"], "L": p["L"],
        "unit_spacing": p["unit_spacing"],
        "base_amplitude": p["base_amplitude"],
        "base_support": p["base_support"],
        "residual_tol": p["residual_tol"],
        "sigma": sigma, "rel_offsets": offsets,
    }, cfg=_solver_cfg(cfg), workers=cfg["workers"])


def run_boundary_atom(cfg):
    p = cfg["params"]
    n = cfg["n"]
    S_target = p["S"]
    fam = _boundary_atom_family(cfg)
    origin = tuple([0.0] * n)
    report = concentration_scan(fam, origin, p["probe_radii"])
    R1 = p["concentration_radius"]
    ratios = report.ratios_for(R1)
    outside = [r.mass_outside_sqrt_eps / r.total_mass for r in report.rows]

    mass_err = max(abs(m.energy.S_eps - S_target) / S_target
                   for m in fam.members)
    two_sided, trace_margin = _f_bound_margins(fam)
    tol2 = 2.0 * cfg["solver"]["residual_tol"]

    assertions = [
        _check("atom.mass_pinned",
               "every diffuse mass sits within 2% of the target",
               mass_err, "<=", 0.02),
        _check("atom.concentration_increasing",
               "ball-mass ratio at the fixed radius grows monotonically",
               min(np.diff(ratios)), ">", 0.0),
        _check("atom.concentration_final",
               "final concentration ratio reaches 0.95",
               ratios[-1], ">=", 0.95),
        _check("atom.tail_decreasing",
               "mass outside the sqrt(eps) ball decreases monotonically",
               max(np.diff(outside)), "<", 0.0),
        _check("atom.tail_final", "final tail fraction below 0.05",
               outside[-1], "<=", 0.05),
        _check("atom.two_sided_bound",
               "energy-vs-theta pairs obey the square/fourth-power envelope",
               two_sided, "<=", tol2),
        _check("atom.trace_lower_bound",
               "every cached energy clears the squared boundary trace norm",
               trace_margin, ">=", 0.0),
        _check("atom.willmore_zero", "curvature energy vanishes members-wide",
               max(m.energy.W_eps for m in fam.members), "<=", 1e-6),
        _check("atom.theta_polynomial",
               "theta grows at most polynomially in 1/eps (finite fitted "
               "log-log slope)",
               fam.members[0].certificates.get("theta_growth_slope", 0.0),
               "<=", 8.0),
    ]
    r1, r2 = (float(p["probe_radii"][0]),
              float(p["probe_radii"][min(1, len(p["probe_radii"]) - 1)]))
    rows = []
    for m, crow in zip(fam.members, report.rows):
        rows.append(_family_row(
            "boundary_atom", n, m,
            mass_total=crow.total_mass,
            mass_in_R1=crow.ball_masses[r1],
            mass_in_R2=crow.ball_masses[r2],
            mass_outside_Reps=crow.mass_outside_sqrt_eps))
    fields = [(f"boundary_atom_eps{i}", m.field)
              for i, m in enumerate(fam.members)]
    return rows, assertions, fields


def _f_bound_margins(fam):
    """Worst two-sided-bound violation (relative) and worst trace-bound
    margin (relative) across all cached (theta, f) pairs of the family."""
    worst_pair = -np.inf
    worst_trace = np.inf
    for m in fam.members:
        pairs = m.certificates.get("f_pairs", [])
        trace_sq = m.certificates.get("trace_norm_sq", 0.0)
        for th, fv in pairs:
            worst_trace = min(worst_trace,
                              (fv - th * th * trace_sq) / max(fv, 1e-300))
        for th1, f1 in pairs:
            for th2, f2 in pairs:
                if th1 == th2:
                    continue
                r = th2 / th1
                bound = max(r * r, r ** 4) * f1
                worst_pair = max(worst_pair, (f2 - bound) / max(bound, 1e-300))
    return worst_pair, worst_trace


def run_hausdorff_levelset(cfg):
    p = cfg["params"]
    n = cfg["n"]
    sched = EpsilonSchedule(tuple(cfg["eps_list"]))
    fam = build_family("hausdorff_levelset", sched, {
        "n": n, "L": p["L"], "unit_spacing": p["unit_spacing"],
        "residual_tol": p["residual_tol"],
    }, cfg=_solver_cfg(cfg), workers=cfg["workers"])

    band = p["level_band"]
    origin = np.zeros(n)
    sup_excess = max(lp_norm(m.field, "inf") - 1.0 for m in fam.members)
    distances = []
    counts = []
    for m in fam.members:
        cells = level_set(m.field, (-band, band))
        counts.append(cells.count())
        if cells.is_empty:
            distances.append(np.inf)
        else:
            distances.append(hausdorff_distance(cells, origin))
    S = [m.energy.S_eps for m in fam.members]

    assertions = [
        _check("hausdorff.range", "fields stay inside [-1, 1] up to 1e-6",
               sup_excess, "<=", 1e-6),
        _check("hausdorff.level_set_nonempty",
               "the mid-range level band is hit at every eps",
               min(counts), ">", 0.0),
        _check("hausdorff.distance",
               "level-set cells sit within the distance_factor * eps ball",
               max(d - p["distance_factor"] * m.eps
                   for d, m in zip(distances, fam.members)), "<=", 0.0),
        _check("hausdorff.mass_to_zero",
               "total masses decrease strictly toward zero",
               max(np.diff(S)), "<", 0.0),
        _check("hausdorff.willmore_zero", "curvature energies vanish",
               max(m.energy.W_eps for m in fam.members), "<=", 1e-6),
    ]
    rows = [_family_row("hausdorff_levelset", n, m, mass_total=m.energy.S_eps)
            for m in fam.members]
    fields = [(f"hausdorff_eps{i}", m.field) for i, m in enumerate(fam.members)]
    return rows, assertions, fields


def run_hoelder_blowup(cfg):
    p = cfg["params"]
    n = cfg["n"]
    gamma = p["gamma"]
    sched = EpsilonSchedule(tuple(cfg["eps_list"]))
    fam = build_family("hoelder_blowup", sched, {
        "n": n, "window": p["window"],
        "points_per_unit_scale": p["points_per_unit_scale"],
        "residual_tol": p["residual_tol"],
    }, cfg=_solver_cfg(cfg), workers=cfg["workers"])

    scaled_boundary = []
    interior_raw = []
    rows = []
    for m in fam.members:
        g = m.field.grid
        coords_n = g.axis_coords(n - 1)
        strip = coords_n <= coords_n[0] + 2.5 * g.spacing
        sh = [1] * n
        sh[n - 1] = -1
        strip_mask = np.broadcast_to(strip.reshape(sh), g.shape).copy()
        qb = hoelder_quotient(m.field, m.eps, gamma, strip_mask)
        interior = interior_region_mask(g, 2.0 * m.eps)
        qi = hoelder_quotient(m.field, m.eps, gamma, interior, mode="dyadic")
        scaled_boundary.append(m.eps ** gamma * qb.quotient)
        interior_raw.append(qi.quotient)
        rows.append(_family_row("hoelder_blowup", n, m,
                                mass_total=m.energy.S_eps,
                                hoelder_boundary=qb.quotient,
                                hoelder_interior=qi.quotient))

    variation = ((max(interior_raw) - min(interior_raw)) / max(interior_raw)
                 if max(interior_raw) > 0 else 0.0)
    assertions = [
        _check("hoelder.boundary_divergence",
               "scaled boundary quotients grow strictly along the sweep",
               min(np.diff(scaled_boundary)), ">", 0.0),
        _check("hoelder.interior_stable",
               "interior quotients on the shrunken domain stay flat",
               variation, "<", p["interior_variation_tol"]),
        _check("hoelder.willmore_zero", "curvature energies vanish",
               max(m.energy.W_eps for m in fam.members), "<=", 1e-6),
    ]
    fields = [(f"hoelder_eps{i}", m.field) for i, m in enumerate(fam.members)]
    return rows, assertions, fields


def run_oscillation_atom(cfg):
    p = cfg["params"]
    n = cfg["n"]
    sched = EpsilonSchedule(tuple(cfg["eps_list"]))
    fam = build_family("oscillation_atom", sched, {
        "n": n, "S_prime": p["S_prime"], "delta": p["delta"],
        "R": p["R"], "unit_spacing": p["unit_spacing"],
        "residual_tol": p["residual_tol"],
    }, cfg=_solver_cfg(cfg), workers=cfg["workers"])

    S_prime, delta = p["S_prime"], p["delta"]
    m0 = fam.members[0]
    semi = m0.certificates["seminorm"]
    diri = m0.certificates["dirichlet_energy"]
    floor = 1.0 - 2.0 * delta
    min_u = min(m.certificates["min_u"] for m in fam.members)

    assertions = [
        _check("oscillation.seminorm_lo",
               "constructed trace seminorm reaches the target",
               semi, ">=", S_prime),
        _check("oscillation.seminorm_hi",
               "seminorm stays within 10% above the target",
               semi, "<=", 1.1 * S_prime),
        _check("oscillation.floor",
               "fields never dip below the potential floor",
               min_u, ">=", floor - 1e-6),
        _check("oscillation.dirichlet_bound",
               "gradient energy dominates 0.9 times the trace seminorm",
               diri, ">=", 0.9 * semi),
        _check("oscillation.willmore_zero", "curvature energies vanish",
               max(m.energy.W_eps for m in fam.members), "<=", 1e-6),
    ]
    rows = [_family_row("oscillation_atom", n, m, mass_total=m.energy.S_eps)
            for m in fam.members]
    fields = [(f"oscillation_eps{i}", m.field)
              for i, m in enumerate(fam.members)]
    return rows, assertions, fields


def run_neumann_layer(cfg):
    p = cfg["params"]
    n = cfg["n"]
    eps_list = cfg["eps_list"]
    masses = []
    rows = []
    fields = []
    for i, eps in enumerate(eps_list):
        u = neumann_layer_field(eps, L=p["L"],
                                interfaces=tuple(p["interfaces"]),
                                bump_amp=p["bump_amp"],
                                amp_power=p["amp_power"])
        mass = boundary_layer_mass(u, eps, theta=1.0)
        masses.append(mass)
        rows.append(_row("neumann_layer", n, eps,
                         S_eps=modica_mortola(u, eps),
                         W_eps=willmore_eps(u, eps),
                         boundary_layer_mass=mass,
                         sup_u=float(np.max(np.abs(u.values)))))
        if i == len(eps_list) - 1:
            fields.append(("neumann_layer_finest", u))
    if all(m > 0 for m in masses):
        exponent = float(np.polyfit(np.log(eps_list), np.log(masses), 1)[0])
    else:
        # an empty excess set at some eps leaves no scaling to fit
        exponent = -np.inf
    assertions = [
        _check("neumann.layer_exponent",
               "excess-set mass scales at least like eps^1.8 over the sweep",
               exponent, ">=", p["exponent_floor"]),
        _check("neumann.layer_nonempty",
               "the excess set carries positive mass at every eps",
               min(masses), ">", 0.0),
    ]
    return rows, assertions, fields


def run_penalty_zero(cfg):
    p = cfg["params"]
    n = cfg["n"]
    eps_list = cfg["eps_list"]
    eps0 = eps_list[0]
    offsets = [p["offset_scale"] * (e / eps0) for e in eps_list]
    fam = _boundary_atom_family(cfg, sigma=p["sigma"], offsets=offsets)
    pen = [m.energy.F_eps_penalized for m in fam.members]
    assertions = [
        _check("penalty.monotone",
               "penalized energies decrease strictly along the sweep",
               max(np.diff(pen)), "<", 0.0),
        _check("penalty.final", "final penalized energy at most 1e-4",
               pen[-1], "<=", 1e-4),
    ]
    rows = [_family_row("penalty_zero", n, m, mass_total=m.energy.S_eps)
            for m in fam.members]
    fields = [(f"penalty_zero_eps{i}", m.field)
              for i, m in enumerate(fam.members)]
    return rows, assertions, fields


RUNNERS = {
    "tanh_calibration": run_tanh_calibration,
    "unbounded": run_unbounded,
    "boundary_atom": run_boundary_atom,
    "hausdorff_levelset": run_hausdorff_levelset,
    "hoelder_blowup": run_hoelder_blowup,
    "oscillation_atom": run_oscillation_atom,
    "neumann_layer": run_neumann_layer,
    "penalty_zero": run_penalty_zero,
}


# --------------------------------------------------------------------------
# emission
# --------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _write_csv(path, rows):
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in CSV_COLUMNS))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def render_summary(summary_doc) -> str:
    lines = [f"experiment: {summary_doc['experiment']}",
             f"overall: {'PASS' if summary_doc['passed'] else 'FAIL'}", ""]
    for a in summary_doc["assertions"]:
        status = "PASS" if a["passed"] else "FAIL"
        lines.append(f"[{status}] {a['id']}: {a['value']:.6g} "
                     f"{a['comparator']} {a['threshold']:.6g}  "
                     f"({a['description']})")
    return "\n".join(lines) + "\n"


def run(config: dict) -> VerificationSummary:
    """Validate, execute and emit one experiment run.

    Raises ValueError on an invalid config.  Returns the verification
    summary; all artifacts are written under ``config['output_dir']``.
    """
    errors = validate(config)
    if errors:
        raise ValueError("invalid config: " + "; ".join(errors))
    cfg = expand_config(config)
    if cfg["workers"] is None:
        cfg["workers"] = int(os.environ.get("PHASELAB_WORKERS", "1"))

    rows, assertions, fields = RUNNERS[cfg["experiment"]](cfg)
    summary = VerificationSummary.of(cfg["experiment"], assertions)

    out = cfg["output_dir"]
    os.makedirs(out, exist_ok=True)
    os.makedirs(os.path.join(out, "fields"), exist_ok=True)
    written = []

    csv_path = os.path.join(out, "sweep.csv")
    _write_csv(csv_path, rows)
    written.append(csv_path)

    for name, fld in fields:
        written.extend(save_field(fld, os.path.join(out, "fields", name)))

    summary_doc = {
        "experiment": cfg["experiment"],
        "passed": summary.passed,
        "assertions": [asdict(a) for a in assertions],
        "config": {k: cfg[k] for k in
                   ("experiment", "n", "eps_list", "solver", "params", "seed")},
        "conventions": {
            "normalization_constant_c0": c0(),
            "seminorm_constant": "harmonic-extension normalization, "
                                 "1/(2 pi) for 1D faces, 1/(4 pi) for 2D",
            "mass_values": "S_eps columns use the 1/c0-normalized diffuse "
                           "perimeter; F_unit is the raw unit-scale energy",
        },
    }
    spath = os.path.join(out, "summary.json")
    with open(spath, "w") as fh:
        json.dump(summary_doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(spath)

    tpath = os.path.join(out, "summary.txt")
    with open(tpath, "w") as fh:
        fh.write(render_summary(summary_doc))
    written.append(tpath)

    manifest = {"files": {os.path.relpath(f, out): _sha256(f)
                          for f in sorted(written)}}
    mpath = os.path.join(out, "manifest.json")
    with open(mpath, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary
