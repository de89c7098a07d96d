"""Double-well potential, discrete differential operators and the diffuse
energies with their localized density fields.

Definitions (all with the standard well ``W(s) = (s^2 - 1)^2 / 4`` and the
normalization ``c0 = integral of sqrt(2 W) over (-1, 1) = 2 sqrt(2) / 3``):

* ``modica_mortola``  : the scaled perimeter energy
  ``S_eps(u) = (1/c0) * sum_cells [ (eps/2) |grad u|^2 + W(u)/eps ] h^n``
* ``willmore_eps``    : the scaled curvature energy
  ``W_eps(u) = (1/(c0 eps)) * sum_cells ( eps lap(u) - W'(u)/eps )^2 h^n``
* ``half_space_energy``: the unit-scale energy
  ``F(u) = sum_cells [ |grad u|^2 / 2 + W(u) ] h^n``  (no 1/c0 factor)
* ``penalized_functional``: ``W_eps + eps^(-sigma) (S_eps - S_target)^2``

``density_fields`` returns per-cell densities whose region sums reproduce
the energies with identical summands.  Gradients are centered in the
interior and one-sided second order at faces.  The curvature density is
the squared defect of the discrete stationarity equation; it is set to
zero on Dirichlet-constrained face layers, where no equation is imposed
(the continuum density there sits on a node layer of measure O(h), which
the cell-sum quadrature is free to drop at its accuracy order).

Summation is plain row-major ``np.sum``, so energies are bit-reproducible
for fixed inputs on a given platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import (
    LOW,
    HIGH,
    Grid,
    NeumannZero,
    check_roles,
    default_roles,
    dirichlet_mask,
)

__all__ = [
    "Potential",
    "standard_potential",
    "modified_floor_potential",
    "potential_eval",
    "ScalarField",
    "EnergyBreakdown",
    "c0",
    "laplacian",
    "gradient",
    "grad_squared",
    "modica_mortola",
    "willmore_eps",
    "density_fields",
    "half_space_energy",
    "dirichlet_part",
    "penalized_functional",
    "barrier_profile",
    "supersolution_margin",
]

#: Upper bound on the floor parameter delta of the modified potential;
#: below it, W'' (1 - 2 delta) > 0, so W' stays monotone on the clamped range.
MAX_FLOOR_DELTA = (1.0 - 1.0 / math.sqrt(3.0)) / 2.0


def c0() -> float:
    """Normalizing constant ``2 sqrt(2) / 3`` of the 1D optimal profile."""
    return 2.0 * math.sqrt(2.0) / 3.0


@dataclass(frozen=True)
class Potential:
    """Double well ``W(s) = (s^2-1)^2/4``, optionally clamped to a constant
    floor below ``1 - 2 delta`` (then W' and W'' vanish on the clamped part).
    """

    floor_delta: float | None = None

    def __post_init__(self):
        d = self.floor_delta
        if d is not None and not (0.0 < d < MAX_FLOOR_DELTA):
            raise ValueError(
                f"floor delta must lie in (0, {MAX_FLOOR_DELTA:.6f}), got {d}")

    @property
    def kind(self) -> str:
        return "standard" if self.floor_delta is None else "modified_floor"

    @property
    def floor_level(self) -> float | None:
        return None if self.floor_delta is None else 1.0 - 2.0 * self.floor_delta

    def value(self, s):
        s = np.asarray(s, dtype=float)
        w = (s * s - 1.0) ** 2 / 4.0
        if self.floor_delta is not None:
            lvl = self.floor_level
            w = np.where(s <= lvl, (lvl * lvl - 1.0) ** 2 / 4.0, w)
        return w if w.ndim else float(w)

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        d = s ** 3 - s
        if self.floor_delta is not None:
            d = np.where(s < self.floor_level, 0.0, d)
        return d if d.ndim else float(d)

    def second_derivative(self, s):
        s = np.asarray(s, dtype=float)
        d2 = 3.0 * s * s - 1.0
        if self.floor_delta is not None:
            d2 = np.where(s < self.floor_level, 0.0, d2)
        return d2 if d2.ndim else float(d2)


def standard_potential() -> Potential:
    return Potential()


def modified_floor_potential(delta: float) -> Potential:
    return Potential(floor_delta=delta)


STANDARD = Potential()


def potential_eval(p: Potential, s):
    """(W, W', W'') at s."""
    return p.value(s), p.derivative(s), p.second_derivative(s)


# --------------------------------------------------------------------------
# fields
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalarField:
    """Nodal samples of a scalar function together with the face roles used
    when evaluating boundary-aware operators."""

    grid: Grid
    values: np.ndarray
    roles: dict

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values shape {self.values.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite everywhere")
        check_roles(self.grid, self.roles)

    @classmethod
    def from_values(cls, grid: Grid, values, roles: dict | None = None):
        return cls(grid, np.asarray(values, dtype=float),
                   default_roles(grid) if roles is None else roles)

    def with_values(self, values) -> "ScalarField":
        return ScalarField(self.grid, values, self.roles)


# --------------------------------------------------------------------------
# discrete operators
# --------------------------------------------------------------------------

def _axis_gradient(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Centered differences in the interior, one-sided second order at the
    two face layers."""
    g = np.empty_like(values)
    mid = [slice(None)] * values.ndim
    plus = [slice(None)] * values.ndim
    minus = [slice(None)] * values.ndim
    mid[axis], plus[axis], minus[axis] = slice(1, -1), slice(2, None), slice(None, -2)
    g[tuple(mid)] = (values[tuple(plus)] - values[tuple(minus)]) / (2.0 * h)

    def face(i0, i1, i2, sign):
        idx = [slice(None)] * values.ndim
        idx[axis] = i0
        out = list(idx)
        a = values[tuple(out)]
        idx[axis] = i1
        b = values[tuple(idx)]
        idx[axis] = i2
        c = values[tuple(idx)]
        g[tuple(out)] = sign * (-3.0 * a + 4.0 * b - c) / (2.0 * h)

    face(0, 1, 2, +1.0)
    face(-1, -2, -3, -1.0)
    return g


def gradient(u: ScalarField) -> list[np.ndarray]:
    """Per-axis gradient samples of the field."""
    return [_axis_gradient(u.values, a, u.grid.spacing) for a in range(u.grid.n)]


def grad_squared(u: ScalarField) -> np.ndarray:
    out = np.zeros(u.grid.shape)
    for g in gradient(u):
        out += g * g
    return out


def _axis_second(values: np.ndarray, axis: int, h: float, role_low, role_high):
    """Second differences along one axis with role-dependent face closure.

    Interior nodes use the standard centered stencil on the stored values
    (prescribed boundary values enter automatically through the face
    layers).  At a NeumannZero face the missing neighbor is the mirror
    ghost; at Dirichlet and Free faces a one-sided second-order stencil
    (exact on cubics) is used.
    """
    d = np.empty_like(values)
    mid = [slice(None)] * values.ndim
    plus = [slice(None)] * values.ndim
    minus = [slice(None)] * values.ndim
    mid[axis], plus[axis], minus[axis] = slice(1, -1), slice(2, None), slice(None, -2)
    h2 = h * h
    d[tuple(mid)] = (values[tuple(plus)] - 2.0 * values[tuple(mid)]
                     + values[tuple(minus)]) / h2

    def take(i):
        idx = [slice(None)] * values.ndim
        idx[axis] = i
        return values[tuple(idx)]

    def put(i, arr):
        idx = [slice(None)] * values.ndim
        idx[axis] = i
        d[tuple(idx)] = arr

    for side, role in ((LOW, role_low), (HIGH, role_high)):
        if side == LOW:
            u0, u1, u2, u3 = take(0), take(1), take(2), take(3)
            tgt = 0
        else:
            u0, u1, u2, u3 = take(-1), take(-2), take(-3), take(-4)
            tgt = -1
        if isinstance(role, NeumannZero):
            put(tgt, (2.0 * u1 - 2.0 * u0) / h2)
        else:
            put(tgt, (2.0 * u0 - 5.0 * u1 + 4.0 * u2 - u3) / h2)
    return d


def laplacian(u: ScalarField) -> ScalarField:
    """Five/seven-point Laplacian with role-aware face closures."""
    if any(m < 4 for m in u.grid.shape):
        raise ValueError("laplacian needs at least 4 nodes per axis for the "
                         "one-sided face stencils")
    out = np.zeros(u.grid.shape)
    for a in range(u.grid.n):
        out += _axis_second(u.values, a, u.grid.spacing,
                            u.roles[(a, LOW)], u.roles[(a, HIGH)])
    return u.with_values(out)


# --------------------------------------------------------------------------
# energies and densities
# --------------------------------------------------------------------------

def _densities(u: ScalarField, eps: float):
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    c = c0()
    w = STANDARD.value(u.values)
    mu = ((eps / 2.0) * grad_squared(u) + w / eps) / c
    defect = eps * laplacian(u).values - STANDARD.derivative(u.values) / eps
    alpha = defect * defect / (c * eps)
    constrained = dirichlet_mask(u.grid, u.roles)
    alpha[constrained] = 0.0
    return mu, alpha


def density_fields(u: ScalarField, eps: float):
    """(mass density, curvature density) whose cell sums are the energies."""
    mu, alpha = _densities(u, eps)
    return u.with_values(mu), u.with_values(alpha)


def modica_mortola(u: ScalarField, eps: float) -> float:
    """Diffuse perimeter ``S_eps(u)``."""
    mu, _ = _densities(u, eps)
    return float(np.sum(mu)) * u.grid.cell_measure


def willmore_eps(u: ScalarField, eps: float) -> float:
    """Diffuse curvature energy ``W_eps(u)``."""
    _, alpha = _densities(u, eps)
    return float(np.sum(alpha)) * u.grid.cell_measure


def half_space_energy(u: ScalarField) -> float:
    """Unit-scale energy ``F(u)``, no 1/c0 normalization."""
    w = STANDARD.value(u.values)
    dens = 0.5 * grad_squared(u) + w
    return float(np.sum(dens)) * u.grid.cell_measure


def dirichlet_part(u: ScalarField) -> float:
    """``sum |grad u|^2 h^n`` (no 1/2), the trace-energy comparator."""
    return float(np.sum(grad_squared(u))) * u.grid.cell_measure


def penalized_functional(u: ScalarField, eps: float, sigma: float,
                         S_target: float) -> float:
    """Area-penalized curvature functional
    ``W_eps(u) + eps^(-sigma) (S_eps(u) - S_target)^2``."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    s, w = modica_mortola(u, eps), willmore_eps(u, eps)
    return w + eps ** (-sigma) * (s - S_target) ** 2


@dataclass(frozen=True)
class EnergyBreakdown:
    """Per-epsilon energy record of one field."""

    epsilon: float
    S_eps: float
    W_eps: float
    E_eps: float
    sigma: float | None = None
    S_target: float | None = None
    F_eps_penalized: float | None = None

    @classmethod
    def of(cls, u: ScalarField, eps: float, sigma: float | None = None,
           S_target: float | None = None) -> "EnergyBreakdown":
        s = modica_mortola(u, eps)
        w = willmore_eps(u, eps)
        pen = None
        if sigma is not None and S_target is not None:
            pen = w + eps ** (-sigma) * (s - S_target) ** 2
        return cls(eps, s, w, s + w, sigma, S_target, pen)


# --------------------------------------------------------------------------
# explicit barrier 1 + exp(-|x|)
# --------------------------------------------------------------------------

def barrier_profile(grid: Grid):
    """The radial barrier ``psi = 1 + exp(-|x|)`` with its analytic Laplacian
    and the analytic value of W'(psi).

    Returns (psi, lap_psi, wprime_psi) as nodal arrays.  Away from the
    origin, ``lap_psi = (1 + (1-n)/|x|) exp(-|x|)`` and
    ``wprime_psi = (2 + 3 exp(-|x|) + exp(-2|x|)) exp(-|x|)``; the
    supersolution inequality ``lap_psi <= wprime_psi`` holds pointwise.
    """
    r = grid.node_radii()
    e = np.exp(-r)
    with np.errstate(divide="ignore", invalid="ignore"):
        lap = (1.0 + (1.0 - grid.n) / r) * e
    lap[r == 0] = np.nan
    wp = (2.0 + 3.0 * e + e * e) * e
    return 1.0 + e, lap, wp


def supersolution_margin(grid: Grid, min_radius: float = 1.0) -> float:
    """Minimum of ``W'(psi) - lap(psi)`` over nodes with ``|x| >= min_radius``
    (analytic formulas).  Nonnegative means the barrier certificate holds."""
    r = grid.node_radii()
    _, lap, wp = barrier_profile(grid)
    sel = r >= min_radius
    if not sel.any():
        raise ValueError("no nodes at or beyond min_radius")
    return float(np.min((wp - lap)[sel]))


def gradient_bound_margin(u: ScalarField, stride: int = 4) -> float:
    """Optional diagnostic: worst margin of the unit-cube gradient estimate

        |grad u(x)| <= n sqrt(n) sup_{boundary of Q} |u| + sup_Q |lap u| / 2

    over sampled anchor nodes x whose unit cube Q = x + [0, 1]^n fits in
    the grid.  Returns min(bound - |grad u|); nonnegative means the
    estimate holds at every sampled anchor.  Diagnostic only, not part of
    any operation contract.
    """
    g = u.grid
    w = round(1.0 / g.spacing)
    if w < 2 or any(m <= w for m in g.shape):
        raise ValueError("grid cannot host a unit cube")
    gsq = np.sqrt(grad_squared(u))
    lap = np.abs(laplacian(u).values)
    vals = np.abs(u.values)
    factor = g.n * math.sqrt(g.n)
    worst = np.inf
    anchors = np.ndindex(*(max(1, (m - w - 1) // stride) for m in g.shape))
    for a in anchors:
        idx = tuple(ai * stride for ai in a)
        box = tuple(slice(i, i + w + 1) for i in idx)
        sub = vals[box]
        mask = np.ones(sub.shape, dtype=bool)
        mask[tuple(slice(1, -1) for _ in idx)] = False
        sup_boundary = sub[mask].max()
        bound = factor * sup_boundary + 0.5 * lap[box].max()
        worst = min(worst, bound - gsq[idx])
    return float(worst)
