"""Boundary-data families and epsilon-indexed phase-field constructions.

Each family solves the unit-scale problem once per epsilon and transports
the solution to the physical grid through ``u_eps(x) = u_unit(x / eps)``.
The physical grid of a member is the exact ``eps``-scaled image of its
unit grid, so the transport is the identity on node indices, rescaling is
exact at every node, and the discrete stationarity defect of the physical
field is the unit-solve residual divided by eps.  Unit solves therefore
run at residual tolerance ``eps * residual_tol``, which makes the
certified bound

    W_eps(u_eps) <= residual_tol^2 * volume / (c0 * eps)

hold for the computed curvature energy by construction.

Family kinds
------------
``unbounded``          boundary bumps ``theta_eps * h`` with
                       ``eps^(n-1) theta_eps^4 -> 0``; sup-norms blow up
                       while all energies vanish.
``boundary_atom``      ``theta_eps`` tuned so the diffuse mass is exactly
                       S for every eps; the mass concentrates at one
                       boundary point.
``hausdorff_levelset`` data ``1 - h`` with ``h(0) = 2``; fields stay in
                       [-1, 1] and every mid-range level set survives near
                       the origin at scale eps.
``hoelder_blowup``     data ``1 - h(omega_eps x)`` on a blow-up window
                       ``eps * [-B, B]^(n-1) x [0, B*eps]``; boundary
                       Hoelder quotients at scale eps grow without bound.
``oscillation_atom``   oscillatory data ``1 - h`` with ``0 <= h <= delta``
                       and large trace seminorm, solved with the
                       floor-modified potential.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .energy import (
    EnergyBreakdown,
    Potential,
    ScalarField,
    c0,
    dirichlet_part,
    standard_potential,
    modified_floor_potential,
)
from .grid import Grid, NeumannZero, make_half_space_grid
from .solver import SolveConfig, SolveResult, solve_half_space

__all__ = [
    "BoundaryData",
    "EpsilonSchedule",
    "FamilyMember",
    "CounterexampleFamily",
    "BracketFailureError",
    "ResolutionExhaustedError",
    "bump",
    "exp_decay_profile",
    "compact_bump_profile",
    "f_of_theta",
    "FThetaCache",
    "find_theta_for_mass",
    "build_family",
    "rescale_field",
    "h_half_seminorm",
    "seminorm_constant",
    "build_oscillating_boundary",
    "neumann_layer_field",
    "FAMILY_KINDS",
]

FAMILY_KINDS = ("unbounded", "boundary_atom", "hausdorff_levelset",
                "hoelder_blowup", "oscillation_atom")


class BracketFailureError(RuntimeError):
    """The energy-vs-theta curve cannot reach the requested target below
    the configured theta ceiling (grid or truncation radius too small)."""


class ResolutionExhaustedError(RuntimeError):
    """The boundary grid cannot resolve the oscillation frequency needed
    to reach the requested seminorm; refine the spacing."""


# --------------------------------------------------------------------------
# boundary data
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryData:
    """Samples of a boundary function on the flat-face node lattice.

    ``coords`` holds one coordinate array per tangential axis (empty tuple
    in dimension one, where the face is a single point).  The optional
    ``envelope = (C_h, rate)`` certifies ``|h| <= C_h exp(-rate |x|)`` and
    is verified by a pointwise scan at construction, as is the exact
    vanishing of the samples outside ``support_radius``.
    """

    coords: tuple
    samples: np.ndarray
    spacing: float
    envelope: tuple[float, float] | None = None
    support_radius: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))
        object.__setattr__(self, "coords",
                           tuple(np.asarray(c, dtype=float) for c in self.coords))
        if self.samples.shape != tuple(len(c) for c in self.coords):
            raise ValueError("samples shape does not match face coordinates")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("boundary samples must be finite")
        r = self.radii()
        if self.envelope is not None:
            C_h, rate = self.envelope
            if np.any(np.abs(self.samples) > C_h * np.exp(-rate * r) + 1e-12):
                raise ValueError("envelope certificate fails a pointwise scan")
        if self.support_radius is not None:
            outside = r > self.support_radius
            if np.any(self.samples[outside] != 0.0):
                raise ValueError("samples must vanish exactly outside the "
                                 "support radius")

    def radii(self) -> np.ndarray:
        if not self.coords:
            return np.zeros(())
        r2 = np.zeros(self.samples.shape)
        for a, coord in enumerate(self.coords):
            shape = [1] * len(self.coords)
            shape[a] = -1
            r2 = r2 + coord.reshape(shape) ** 2
        return np.sqrt(r2)

    def scaled(self, factor: float) -> "BoundaryData":
        env = None
        if self.envelope is not None:
            env = (abs(factor) * self.envelope[0], self.envelope[1])
        return BoundaryData(self.coords, factor * self.samples, self.spacing,
                            env, self.support_radius, dict(self.meta))

    @property
    def boundary_dim(self) -> int:
        return len(self.coords)


def _face_coords(grid: Grid) -> tuple:
    return tuple(grid.axis_coords(a) for a in range(grid.n - 1))


def exp_decay_profile(amplitude: float = 1.0, support: float = 4.0,
                      center: float = 0.0):
    """``amplitude * exp(-|x - center|) * window`` with a smooth compactly
    supported window; satisfies ``0 <= h <= amplitude * exp(-|x|)`` for
    center 0."""

    def shape(r_centered):
        out = np.zeros_like(r_centered)
        ins = r_centered < support
        t = (r_centered[ins] / support) ** 2
        out[ins] = amplitude * np.exp(-r_centered[ins]) * np.exp(1.0 - 1.0 / (1.0 - t))
        return out

    return shape, support, center


def compact_bump_profile(amplitude: float = 1.0, width: float = 1.0,
                         center: float = 0.0):
    """Smooth bump ``amplitude * exp(1 - 1/(1 - (r/width)^2))`` supported in
    the width-ball; peak value exactly ``amplitude`` at the center."""

    def shape(r_centered):
        out = np.zeros_like(r_centered)
        ins = r_centered < width
        t = (r_centered[ins] / width) ** 2
        out[ins] = amplitude * np.exp(1.0 - 1.0 / (1.0 - t))
        return out

    return shape, width, center


def bump(grid: Grid, theta: float, shape: str = "exp_decay",
         center: float = 0.0, width: float = 1.0,
         amplitude: float = 1.0) -> BoundaryData:
    """``theta`` times a base profile, sampled on the flat face of ``grid``.

    ``shape`` is ``"exp_decay"`` (amplitude * e^-|x| under a smooth window
    of radius ``width``; carries the envelope certificate
    ``(theta * amplitude, 1)``) or ``"compact_bump"`` (smooth bump of the
    given width with peak ``amplitude``).
    """
    if theta < 0:
        raise ValueError(f"theta must be >= 0, got {theta}")
    if shape == "exp_decay":
        fn, support, ctr = exp_decay_profile(amplitude, width, center)
        envelope = (theta * amplitude, 1.0) if center == 0.0 else None
    elif shape == "compact_bump":
        fn, support, ctr = compact_bump_profile(amplitude, width, center)
        envelope = None
    else:
        raise ValueError(f"unknown bump shape {shape!r}")

    coords = _face_coords(grid)
    if coords:
        r2 = np.zeros(tuple(len(c) for c in coords))
        for a, coord in enumerate(coords):
            sh = [1] * len(coords)
            sh[a] = -1
            r2 = r2 + (coord.reshape(sh) - ctr) ** 2
        base = fn(np.sqrt(r2))
    else:
        base = fn(np.asarray([abs(0.0 - ctr)]))[0]
    samples = theta * np.asarray(base)
    return BoundaryData(coords, samples, grid.spacing, envelope,
                        support_radius=support + abs(ctr),
                        meta={"shape": shape, "theta": theta,
                              "amplitude": amplitude, "width": width,
                              "center": center})


# --------------------------------------------------------------------------
# the map theta -> F(u_theta)
# --------------------------------------------------------------------------

class FThetaCache:
    """Insert-only cache of (theta, energy, solve) triples, safe to share
    across concurrent family builds."""

    def __init__(self):
        self._lock = threading.Lock()
        self._entries: dict[float, tuple[float, SolveResult]] = {}

    def get(self, theta: float):
        with self._lock:
            return self._entries.get(theta)

    def insert(self, theta: float, energy: float, result: SolveResult):
        with self._lock:
            self._entries.setdefault(theta, (energy, result))

    def nearest(self, theta: float):
        with self._lock:
            if not self._entries:
                return None
            key = min(self._entries, key=lambda t: abs(t - theta))
            return self._entries[key][1]

    def pairs(self) -> list[tuple[float, float]]:
        with self._lock:
            return sorted((t, e) for t, (e, _) in self._entries.items())


def f_of_theta(theta: float, base: BoundaryData, potential: Potential,
               grid: Grid, cfg: SolveConfig,
               cache: FThetaCache | None = None) -> float:
    """Minimal unit-scale energy for boundary data ``theta * base``.

    Solves are warm-started from the nearest cached theta when a cache is
    supplied; the (theta, f) pair is recorded there.
    """
    if theta < 0:
        raise ValueError(f"theta must be >= 0, got {theta}")
    if cache is not None:
        hit = cache.get(theta)
        if hit is not None:
            return hit[0]
    run_cfg = cfg
    if cache is not None:
        warm = cache.nearest(theta)
        if warm is not None:
            run_cfg = replace(cfg, initial_guess="user", user_field=warm.field)
    result = solve_half_space(theta * base.samples, 1.0, potential, grid, run_cfg)
    if cache is not None:
        cache.insert(theta, result.final_energy, result)
    return result.final_energy


def find_theta_for_mass(S: float, eps: float, n: int, base: BoundaryData,
                        potential: Potential, grid: Grid, cfg: SolveConfig,
                        cache: FThetaCache | None = None,
                        rel_tol: float = 5e-3, rel_offset: float = 0.0,
                        theta_max: float = 1e4) -> float:
    """Theta with ``f(theta) = S * eps^(1-n)`` to relative accuracy rel_tol.

    ``S`` is a unit-scale energy target (callers aiming at a diffuse-mass
    value multiply by c0 first).  The root is found by bracketing with
    doublings (justified by the growth bound ``f(2 theta) <= 16 f(theta)``)
    followed by a safeguarded secant iteration on the strictly increasing
    cached map.  ``rel_offset`` shifts the target to
    ``S eps^(1-n) (1 + rel_offset)`` and must stay below rel_tol; it gives
    penalty-schedule experiments a deterministic landing point inside the
    contractual tolerance band.
    """
    if S <= 0 or eps <= 0:
        raise ValueError("S and eps must be positive")
    if abs(rel_offset) >= rel_tol:
        raise ValueError("rel_offset must be smaller than rel_tol")
    target_contract = S * eps ** (1 - n)
    target = target_contract * (1.0 + rel_offset)
    if rel_offset:
        inner_tol = max(abs(rel_offset) / 10.0, 1e-12)
    else:
        inner_tol = rel_tol / 2.0
    cache = cache if cache is not None else FThetaCache()

    def f(th):
        return f_of_theta(th, base, potential, grid, cfg, cache)

    lo, f_lo = 1.0, f(1.0)
    if f_lo >= target:
        hi, f_hi = lo, f_lo
        while f_lo >= target:
            lo *= 0.5
            if lo < 1e-8:
                raise BracketFailureError("target energy below reach of any "
                                          "positive theta")
            f_lo = f(lo)
    else:
        hi = 2.0
        f_hi = f(hi)
        while f_hi < target:
            lo, f_lo = hi, f_hi
            hi *= 2.0
            if hi > theta_max:
                raise BracketFailureError(
                    f"f(theta) cannot reach {target:.4g} below the ceiling "
                    f"theta_max = {theta_max}")
            f_hi = f(hi)

    best_th, best_err = (lo, abs(f_lo - target)) \
        if abs(f_lo - target) < abs(f_hi - target) else (hi, abs(f_hi - target))
    for _ in range(80):
        if best_err <= inner_tol * target_contract:
            break
        th = lo + (target - f_lo) * (hi - lo) / (f_hi - f_lo)
        th = min(max(th, lo + 0.02 * (hi - lo)), hi - 0.02 * (hi - lo))
        f_th = f(th)
        err = abs(f_th - target)
        if err < best_err:
            best_th, best_err = th, err
        if f_th < target:
            lo, f_lo = th, f_th
        else:
            hi, f_hi = th, f_th

    if abs(f(best_th) - target_contract) > rel_tol * target_contract:
        raise BracketFailureError(
            f"secant landed {abs(f(best_th) - target_contract):.3g} away from "
            f"the target {target_contract:.6g}")
    return best_th


# --------------------------------------------------------------------------
# schedules and families
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EpsilonSchedule:
    """Strictly decreasing epsilon list with optional per-epsilon family
    parameters and the blow-up observation radius (default eps^(-1/2))."""

    eps_list: tuple[float, ...]
    theta_of_eps: dict | None = None
    omega_of_eps: dict | None = None

    def __post_init__(self):
        object.__setattr__(self, "eps_list",
                           tuple(float(e) for e in self.eps_list))
        eps = self.eps_list
        if len(eps) == 0:
            raise ValueError("eps_list must be non-empty")
        if any(e <= 0 or not math.isfinite(e) for e in eps):
            raise ValueError("eps values must be finite and positive")
        if not all(b < a for a, b in zip(eps, eps[1:])):
            raise ValueError("eps_list must be strictly decreasing")
        for mapping in (self.theta_of_eps, self.omega_of_eps):
            if mapping is not None:
                vals = [mapping[e] for e in eps]
                if any(v <= 0 or not math.isfinite(v) for v in vals):
                    raise ValueError("schedule parameters must be finite and "
                                     "positive for every eps")

    def R_of_eps(self, eps: float) -> float:
        return eps ** -0.5

    def theta(self, eps: float) -> float:
        if self.theta_of_eps is None:
            raise ValueError("schedule carries no theta values")
        return float(self.theta_of_eps[eps])

    def omega(self, eps: float) -> float:
        if self.omega_of_eps is None:
            return eps ** -0.5
        return float(self.omega_of_eps[eps])


@dataclass(frozen=True)
class FamilyMember:
    eps: float
    parameter: float | None
    unit_grid: Grid
    unit_result: SolveResult
    field: ScalarField
    energy: EnergyBreakdown
    certificates: dict


@dataclass(frozen=True)
class CounterexampleFamily:
    kind: str
    members: tuple[FamilyMember, ...]
    params: dict

    def eps_values(self):
        return [m.eps for m in self.members]


def rescale_field(unit_field: ScalarField, eps: float,
                  physical_grid: Grid, roles: dict | None = None) -> ScalarField:
    """``u_eps(x) = u_unit(x / eps)`` on the physical grid.

    When the physical grid is exactly the eps-scaled image of the unit
    grid the values are copied (identity on node indices); otherwise the
    unit field is evaluated by multilinear interpolation, with query
    points snapped to unit nodes when they coincide up to roundoff, so the
    rescaling stays exact on matched nodes.
    """
    ug = unit_field.grid
    roles = roles if roles is not None else unit_field.roles
    matched = (physical_grid.shape == ug.shape
               and abs(physical_grid.spacing - eps * ug.spacing)
               <= 1e-12 * ug.spacing
               and all(abs(po - eps * uo) <= 1e-12 * max(1.0, abs(uo))
                       for po, uo in zip(physical_grid.origin, ug.origin)))
    if matched:
        return ScalarField(physical_grid, unit_field.values.copy(), roles)

    axes = [ug.axis_coords(a) for a in range(ug.n)]
    interp = RegularGridInterpolator(axes, unit_field.values, method="linear",
                                     bounds_error=True)
    mesh = physical_grid.meshgrid()
    pts = np.stack([x.ravel() / eps for x in mesh], axis=-1)
    for a, coord in enumerate(axes):
        idx = np.rint((pts[:, a] - coord[0]) / ug.spacing)
        snapped = coord[0] + idx * ug.spacing
        close = np.abs(pts[:, a] - snapped) <= 1e-9 * ug.spacing
        pts[close, a] = snapped[close]
    vals = interp(pts).reshape(physical_grid.shape)
    return ScalarField(physical_grid, vals, roles)


def _member_from_solve(eps: float, parameter, grid: Grid, result: SolveResult,
                       residual_tol_phys: float, sigma=None, S_target=None,
                       extra_certs=None) -> FamilyMember:
    phys_grid = grid.scaled(eps)
    phys = rescale_field(result.field, eps, phys_grid)
    energy = EnergyBreakdown.of(phys, eps, sigma, S_target)
    volume = phys_grid.num_nodes * phys_grid.cell_measure
    w_bound = residual_tol_phys ** 2 * volume / (c0() * eps)
    book = eps ** (grid.n - 1) * result.final_energy / c0()
    certs = {
        "willmore_bound": w_bound,
        "willmore_ok": energy.W_eps <= w_bound,
        "unit_residual": result.residual,
        "physical_defect": result.residual / eps,
        "mass_bookkeeping_rel": abs(energy.S_eps - book) / max(abs(book), 1e-300),
        "sup_u": float(np.max(phys.values)),
        "min_u": float(np.min(phys.values)),
    }
    if extra_certs:
        certs.update(extra_certs)
    return FamilyMember(eps, parameter, grid, result, phys, energy, certs)


def _half_space_unit_grid(n: int, R: float, unit_spacing: float):
    m = max(4, round(R / unit_spacing))
    return make_half_space_grid(n, m * unit_spacing, unit_spacing, 1.0)


def build_family(kind: str, schedule: EpsilonSchedule, params: dict,
                 cfg: SolveConfig | None = None,
                 workers: int = 1) -> CounterexampleFamily:
    """Construct one counterexample family over the epsilon schedule.

    ``params`` is kind-specific (see the module docstring); common keys are
    ``n`` (dimension, default 2), ``L`` (physical half-width of the fixed
    domain), ``unit_spacing`` and ``residual_tol`` (the physical-defect
    tolerance of the curvature certificate, default 1e-6).  Unit solves run
    at ``eps * residual_tol``.

    Members are independent across epsilon and are built on up to
    ``workers`` threads; the returned tuple is always ordered by the
    schedule, so results do not depend on the worker count.
    """
    if kind not in FAMILY_KINDS:
        raise ValueError(f"unknown family kind {kind!r}")
    cfg = cfg or SolveConfig()
    params = dict(params)
    n = int(params.get("n", 2))
    tol_phys = float(params.get("residual_tol", 1e-6))
    builder = {
        "unbounded": _build_unbounded,
        "boundary_atom": _build_boundary_atom,
        "hausdorff_levelset": _build_hausdorff,
        "hoelder_blowup": _build_hoelder,
        "oscillation_atom": _build_oscillation,
    }[kind]
    members = builder(schedule, params, n, tol_phys, cfg, max(1, int(workers)))
    return CounterexampleFamily(kind, tuple(members), params)


def _map_members(fn, eps_list, workers: int):
    """Order-preserving map over the epsilon list, optionally threaded."""
    if workers <= 1 or len(eps_list) <= 1:
        return [fn(e) for e in eps_list]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=min(workers, len(eps_list))) as pool:
        return list(pool.map(fn, eps_list))


def _solve_cfg(cfg: SolveConfig, eps: float, tol_phys: float) -> SolveConfig:
    return replace(cfg, residual_tol=eps * tol_phys,
                   initial_guess="boundary_extension", user_field=None)


def _build_unbounded(schedule, params, n, tol_phys, cfg, workers):
    if schedule.theta_of_eps is None:
        raise ValueError("unbounded family needs a theta schedule")
    eps_arr = schedule.eps_list
    drive = [e ** (n - 1) * schedule.theta(e) ** 4 for e in eps_arr]
    if not all(b < a for a, b in zip(drive, drive[1:])):
        raise ValueError("unbounded family requires eps^(n-1) theta^4 "
                         "strictly decreasing along the schedule")
    L = float(params.get("L", 0.5))
    hu = float(params.get("unit_spacing", 1 / 16))
    shape = params.get("base_shape", "compact_bump")
    amp = float(params.get("base_amplitude", 3.0))
    width = float(params.get("base_width", 1.0))
    pot = standard_potential()

    def build_one(eps):
        th = schedule.theta(eps)
        g, _ = _half_space_unit_grid(n, L / eps, hu)
        base = bump(g, 1.0, shape=shape, amplitude=amp, width=width)
        res = solve_half_space(th * base.samples, 1.0, pot, g,
                               _solve_cfg(cfg, eps, tol_phys))
        return _member_from_solve(
            eps, th, g, res, tol_phys,
            extra_certs={"base_peak": float(np.max(base.samples))})

    return _map_members(build_one, eps_arr, workers)


def _build_boundary_atom(schedule, params, n, tol_phys, cfg, workers):
    S = float(params["S"])
    if S <= 0:
        raise ValueError("boundary_atom needs S > 0")
    L = float(params.get("L", 1.0))
    hu = float(params.get("unit_spacing", 1 / 16))
    amp = float(params.get("base_amplitude", 0.5))
    support = float(params.get("base_support", 4.0))
    rel_tol = float(params.get("mass_rel_tol", 5e-3))
    offsets = params.get("rel_offsets")
    sigma = params.get("sigma")
    pot = standard_potential()
    eps_arr = schedule.eps_list
    offset_of = {e: (float(offsets[i]) if offsets is not None else 0.0)
                 for i, e in enumerate(eps_arr)}

    def build_one(eps):
        # the theta -> energy cache is grid-specific, hence per member
        g, _ = _half_space_unit_grid(n, L / eps, hu)
        base = bump(g, 1.0, shape="exp_decay", amplitude=amp, width=support)
        member_cache = FThetaCache()
        th = find_theta_for_mass(c0() * S, eps, n, base, pot, g,
                                 _solve_cfg(cfg, eps, tol_phys),
                                 cache=member_cache, rel_tol=rel_tol,
                                 rel_offset=offset_of[eps])
        _, res = member_cache.get(th)
        return _member_from_solve(
            eps, th, g, res, tol_phys, sigma=sigma, S_target=S,
            extra_certs={"f_pairs": member_cache.pairs(),
                         "trace_norm_sq": _trace_norm_sq(base, n)})

    members = _map_members(build_one, eps_arr, workers)
    if len(members) > 1:
        thetas = [m.parameter for m in members]
        slope = np.polyfit(np.log([1 / e for e in eps_arr]),
                           np.log(thetas), 1)[0]
        members = [replace(m, certificates={**m.certificates,
                                            "theta_growth_slope": float(slope)})
                   for m in members]
    return members


def _trace_norm_sq(base: BoundaryData, n: int) -> float:
    """Discrete boundary L2 norm squared of the base samples."""
    if base.boundary_dim == 0:
        return float(base.samples ** 2)
    return float(np.sum(base.samples ** 2)) * base.spacing ** base.boundary_dim


def _build_hausdorff(schedule, params, n, tol_phys, cfg, workers):
    L = float(params.get("L", 0.5))
    hu = float(params.get("unit_spacing", 1 / 16))
    width = float(params.get("base_width", 1.0))
    pot = standard_potential()

    def build_one(eps):
        g, _ = _half_space_unit_grid(n, L / eps, hu)
        base = bump(g, 1.0, shape="compact_bump", amplitude=2.0, width=width)
        peak = float(np.max(base.samples))
        if abs(peak - 2.0) > 1e-9:
            raise ValueError("hausdorff base bump must peak at exactly 2")
        res = solve_half_space(-base.samples, 1.0, pot, g,
                               _solve_cfg(cfg, eps, tol_phys))
        return _member_from_solve(eps, None, g, res, tol_phys)

    return _map_members(build_one, schedule.eps_list, workers)


def _build_hoelder(schedule, params, n, tol_phys, cfg, workers):
    B = float(params.get("window", 12.0))
    ppu = float(params.get("points_per_unit_scale", 6.0))
    width = float(params.get("base_width", 1.0))
    pot = standard_potential()

    def build_one(eps):
        om = schedule.omega(eps)
        m = int(math.ceil(ppu * om * B))
        hu = B / m
        g, _ = make_half_space_grid(n, B, hu, 1.0)
        # data 1 - h(omega x): sample the peak-2 bump at frequency omega
        base = bump(g, 1.0, shape="compact_bump", amplitude=2.0,
                    width=width / om)
        res = solve_half_space(-base.samples, 1.0, pot, g,
                               _solve_cfg(cfg, eps, tol_phys))
        return _member_from_solve(
            eps, om, g, res, tol_phys,
            extra_certs={"window": B, "unit_spacing": hu})

    return _map_members(build_one, schedule.eps_list, workers)


def _build_oscillation(schedule, params, n, tol_phys, cfg, workers):
    S_prime = float(params["S_prime"])
    delta = float(params["delta"])
    R = float(params.get("R", 2.0))
    hu = float(params.get("unit_spacing", 1 / 64))
    pot = modified_floor_potential(delta)

    def build_one(eps):
        g, _ = _half_space_unit_grid(n, R, hu)
        data = build_oscillating_boundary(S_prime, delta, g)
        res = solve_half_space(-data.samples, 1.0, pot, g,
                               _solve_cfg(cfg, eps, tol_phys))
        return _member_from_solve(
            eps, data.meta["frequency"], g, res, tol_phys,
            extra_certs={"seminorm": data.meta["seminorm"],
                         "dirichlet_energy": dirichlet_part(res.field),
                         "delta": delta,
                         "floor_level": 1.0 - 2.0 * delta})

    return _map_members(build_one, schedule.eps_list, workers)


# --------------------------------------------------------------------------
# trace seminorm and oscillating data
# --------------------------------------------------------------------------

def seminorm_constant(boundary_dim: int) -> float:
    """Normalization of the squared trace seminorm.

    Chosen so the seminorm equals the Dirichlet integral of the harmonic
    extension (hence lower-bounds the Dirichlet integral of every
    extension): 1/(2 pi) for a one-dimensional face, 1/(4 pi) for a
    two-dimensional face.  The convention is recorded in all outputs.
    """
    if boundary_dim == 1:
        return 1.0 / (2.0 * math.pi)
    if boundary_dim == 2:
        return 1.0 / (4.0 * math.pi)
    raise ValueError(f"trace seminorm needs a 1D or 2D face, got dimension "
                     f"{boundary_dim}")


def h_half_seminorm(bd: BoundaryData, chunk: int = 2048) -> float:
    """Squared half-order trace seminorm of compactly supported face data.

    Double sum over distinct node pairs of
    ``c_d |h(x) - h(y)|^2 / |x - y|^(d+1)`` times the squared cell measure,
    where d is the face dimension; the diagonal is excluded.  On uniform
    one-dimensional faces the pair sum is regrouped by node offset and the
    per-offset pieces come from an FFT autocorrelation (same summands,
    O(N log N)); two-dimensional faces use chunked direct summation.  Both
    paths are deterministic for fixed inputs.
    """
    d = bd.boundary_dim
    kernel_power = d + 1
    const = seminorm_constant(d)
    measure = bd.spacing ** d
    if d == 1:
        total = _pair_sum_uniform_1d(bd.samples, bd.spacing, kernel_power)
        return const * total * measure * measure
    mesh = np.meshgrid(*bd.coords, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    vals = bd.samples.ravel()
    total = 0.0
    m = len(vals)
    for start in range(0, m, chunk):
        sl = slice(start, min(start + chunk, m))
        diff = pts[sl, None, :] - pts[None, :, :]
        dist = np.sqrt(np.sum(diff * diff, axis=-1))
        dv = vals[sl, None] - vals[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            k = dv * dv / dist ** kernel_power
        k[~np.isfinite(k)] = 0.0
        total += float(np.sum(k))
    return const * total * measure * measure


def _pair_sum_uniform_1d(vals: np.ndarray, spacing: float, power: int) -> float:
    """``sum_{i != j} (v_i - v_j)^2 / (|i - j| spacing)^power`` for uniform
    node positions, grouped by offset ``m = |i - j|``:

        sum = 2 * sum_m S_m / (m spacing)^power,
        S_m = sum_i (v_{i+m} - v_i)^2,

    with all S_m obtained from one FFT autocorrelation."""
    v = np.asarray(vals, dtype=float)
    nv = len(v)
    if nv < 2:
        return 0.0
    total_sq = float(np.sum(v * v))
    csum = np.cumsum(v * v)
    size = 1 << int(np.ceil(np.log2(2 * nv)))
    fv = np.fft.rfft(v, size)
    corr = np.fft.irfft(fv * np.conj(fv), size)[:nv]
    m = np.arange(1, nv)
    head = csum[m - 1]
    tail = total_sq - csum[nv - 1 - m]
    s_m = (total_sq - head) + (total_sq - tail) - 2.0 * corr[m]
    s_m = np.maximum(s_m, 0.0)
    return float(np.sum(2.0 * s_m / (m * spacing) ** power))


def build_oscillating_boundary(S_prime: float, delta: float, grid: Grid,
                               base_frequency: float = 6.0,
                               min_nodes_per_wavelength: float = 16.0,
                               band: float = 1.1) -> BoundaryData:
    """Oscillatory face data with ``0 <= h <= delta``, support in the unit
    ball and squared trace seminorm in ``[S_prime, band * S_prime]``.

    The oscillation frequency doubles until the discrete seminorm reaches
    S_prime (vertical growth is capped by delta, so the seminorm is driven
    by faster oscillations); overshoot is removed by scaling the samples
    with a constant <= 1.  Raises ResolutionExhaustedError when the face
    grid cannot resolve the frequency the target would need.
    """
    if S_prime <= 0:
        raise ValueError("S_prime must be positive")
    from .energy import MAX_FLOOR_DELTA
    if not (0.0 < delta < MAX_FLOOR_DELTA):
        raise ValueError(f"delta must lie in (0, {MAX_FLOOR_DELTA:.6f})")
    coords = _face_coords(grid)
    if not coords:
        raise ValueError("oscillating data needs a face of dimension >= 1")

    r = np.zeros(tuple(len(c) for c in coords))
    for a, coord in enumerate(coords):
        sh = [1] * len(coords)
        sh[a] = -1
        r = r + coord.reshape(sh) ** 2
    r = np.sqrt(r)
    window = np.zeros_like(r)
    ins = r < 1.0
    window[ins] = np.exp(1.0 - 1.0 / (1.0 - r[ins] ** 2))

    x0 = coords[0]
    sh = [1] * len(coords)
    sh[0] = -1
    x_ax = x0.reshape(sh)

    k = base_frequency
    k_max = 2.0 * math.pi / (min_nodes_per_wavelength * grid.spacing)
    while True:
        if k > k_max:
            raise ResolutionExhaustedError(
                f"frequency {k:.1f} exceeds the resolvable "
                f"{k_max:.1f} at spacing {grid.spacing}; refine the boundary "
                "grid to reach the requested seminorm")
        samples = delta * window * (1.0 + np.sin(k * x_ax)) / 2.0
        bd = BoundaryData(coords, samples, grid.spacing,
                          support_radius=1.0,
                          meta={"frequency": k, "delta": delta, "scale": 1.0,
                                "constant": seminorm_constant(len(coords))})
        semi = h_half_seminorm(bd)
        if semi >= S_prime:
            break
        k *= 2.0

    scale = 1.0
    if semi > band * S_prime:
        scale = math.sqrt(0.5 * (1.0 + band) * S_prime / semi)
        bd = bd.scaled(scale)
        semi = h_half_seminorm(bd)
    if not (S_prime <= semi <= band * S_prime * (1 + 1e-9)):
        raise ResolutionExhaustedError(
            f"could not land the seminorm in [{S_prime}, {band * S_prime}]; "
            f"got {semi}")
    meta = dict(bd.meta)
    meta.update({"seminorm": semi, "scale": scale})
    return BoundaryData(bd.coords, bd.samples, bd.spacing, None, 1.0, meta)


# --------------------------------------------------------------------------
# zero-Neumann comparison class
# --------------------------------------------------------------------------

def neumann_layer_field(eps: float, L: float = 2.4,
                        interfaces: tuple[float, float] = (0.7, 1.7),
                        bump_amp: float = 0.5, amp_power: float = 1.5,
                        spacing: float | None = None) -> ScalarField:
    """Stripe profile between two flat interfaces plus a small plateau
    perturbation, with zero-Neumann face roles.

    The profile is constant along the tangential axis (exact zero normal
    difference at those faces) and exponentially flat at the normal faces.
    The perturbation is a pair of smooth bumps of amplitude
    ``bump_amp * eps^amp_power`` supported inside the +1 plateau, which
    push the field above 1 on a fixed region; the diffuse mass of the
    overshoot then scales like the squared amplitude over eps.
    """
    z1, z2 = interfaces
    h = spacing if spacing is not None else eps / 8.0
    m = round(L / h)
    h = L / m
    g = Grid((m + 1, m + 1), h, (0.0, 0.0))
    X, Z = g.meshgrid()
    s2 = math.sqrt(2.0)
    prof = (np.tanh((Z - z1) / (s2 * eps)) - np.tanh((Z - z2) / (s2 * eps))
            - 1.0)

    def plateau_bump(cx, cz, w):
        r2 = ((X - cx) ** 2 + (Z - cz) ** 2) / w ** 2
        out = np.zeros_like(X)
        ins = r2 < 1.0
        out[ins] = np.exp(1.0 - 1.0 / (1.0 - r2[ins]))
        return out

    zc = 0.5 * (z1 + z2)
    amp = bump_amp * eps ** amp_power
    pert = amp * (plateau_bump(L / 3.0, zc, 0.3)
                  + 0.7 * plateau_bump(2.0 * L / 3.0, zc, 0.35))
    roles = {(a, s): NeumannZero() for a in range(2) for s in ("low", "high")}
    return ScalarField(g, prof + pert, roles)
