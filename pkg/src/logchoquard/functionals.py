"""The energy landscape of -Delta u + a u + (log|.| * u^2) u = 0.

Phi(u) = 1/2 q_a(u) + 1/4 V0(u) with q_a(u) = |grad u|_2^2 + int a u^2 and
V0(u) = B0(u^2, u^2). The Nehari residual is J(u) = q_a(u) + V0(u); on the
manifold {J = 0} the energy reduces to Phi = q_a/4 = -V0/4. States with
q_a * V0 < 0 (the set O) project onto the manifold along their ray by
t_u = sqrt(-q_a/V0).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.ndimage import map_coordinates

from .errors import (
    FieldDataError,
    OutsideScalingRegionError,
    ScalingClipError,
)
from .field import (
    Field,
    Grid,
    grad_inner,
    lp_norm,
    neg_laplacian,
    same_grid,
)
from .logkernel import KernelTable, b_form, log_potential

NEHARI_REL_TOL = 1e-10  # |J| <= tol * max(|q_a|, |V0|, 1) counts as on-manifold
NZERO_FACTOR = 1e-8  # |V0| <= factor * |u|_2^4 counts as degenerate (N_0)


@dataclass(frozen=True)
class Potential:
    a: Field
    sup_norm: float
    ess_inf: float
    symmetry_tag: Optional[object] = None


def make_potential(a: Field, symmetry_tag=None) -> Potential:
    vals = a.values
    return Potential(
        a=a,
        sup_norm=float(np.max(np.abs(vals))),
        ess_inf=float(np.min(vals)),
        symmetry_tag=symmetry_tag,
    )


def const_potential(grid: Grid, value: float = 1.0) -> Potential:
    return make_potential(Field(grid, np.full((grid.n, grid.n), float(value))))


def cos2d_potential(grid: Grid, base: float, amp: float, k1: float, k2: float) -> Potential:
    vals = base + amp * np.cos(2.0 * np.pi * k1 * grid.x1) * np.cos(2.0 * np.pi * k2 * grid.x2)
    return make_potential(Field(grid, vals))


def radial_well_potential(grid: Grid, depth: float, radius: float) -> Potential:
    """a = 1 everywhere except a smooth well of the given depth inside |x| < radius."""
    s2 = (grid.r / radius) ** 2
    vals = np.ones((grid.n, grid.n))
    inside = s2 < 1.0
    vals[inside] -= depth * np.exp(1.0 - 1.0 / (1.0 - s2[inside]))
    return make_potential(Field(grid, vals))


@dataclass(frozen=True)
class EnergyBreakdown:
    q_a: float
    v0: float
    v1_tau: float
    v2_tau: float
    phi: float
    nehari_j: float
    tau: float


@dataclass(frozen=True)
class NehariClass:
    label: str  # Nminus | Nplus | Nzero | OffNehari
    violation: float  # |J| / max(|q_a|, |V0|, 1)


def q_a_bilinear(u: Field, v: Field, pot: Potential) -> float:
    """h^2 sum (Du . Dv + a u v); the quadratic part of the energy."""
    grid = same_grid(u, v)
    same_grid(u, pot.a)
    weighted = float(grid.h * grid.h * np.sum(pot.a.values * u.values * v.values))
    return grad_inner(u, v) + weighted


def energy(u: Field, pot: Potential, table: KernelTable) -> EnergyBreakdown:
    """Full breakdown from one k0 convolution; V2 comes from the exact splitting."""
    grid = same_grid(u, pot.a)
    u_sq = Field(grid, u.values * u.values)
    w0 = log_potential(u_sq, table)
    v0 = float(grid.h * grid.h * np.sum(u_sq.values * w0.values))
    v1 = b_form(u_sq, u_sq, "B1", table)
    qa = q_a_bilinear(u, u, pot)
    return EnergyBreakdown(
        q_a=qa,
        v0=v0,
        v1_tau=v1,
        v2_tau=v1 - v0,
        phi=0.5 * qa + 0.25 * v0,
        nehari_j=qa + v0,
        tau=table.tau,
    )


def phi_prime(u: Field, v: Field, pot: Potential, table: KernelTable) -> float:
    """Directional derivative Phi'(u)v = q_a(u,v) + B0(u^2, u v)."""
    grid = same_grid(u, v)
    w0 = log_potential(Field(grid, u.values * u.values), table)
    nonlocal_term = float(grid.h * grid.h * np.sum(w0.values * u.values * v.values))
    return q_a_bilinear(u, v, pot) + nonlocal_term


def residual_field(u: Field, pot: Potential, table: KernelTable) -> Field:
    """Strong-form residual r = -Delta u + a u + (log * u^2) u.

    Adjoint-consistent with grad_norm_sq: h^2 sum r v = phi_prime(u, v) exactly.
    """
    grid = same_grid(u, pot.a)
    w0 = log_potential(Field(grid, u.values * u.values), table)
    vals = neg_laplacian(u.values, grid.h) + (pot.a.values + w0.values) * u.values
    return Field(grid, vals)


def fiber(t: float, cached: EnergyBreakdown) -> float:
    """Energy along the ray: f_u(t) = t^2/2 q_a + t^4/4 V0, no convolutions."""
    t2 = t * t
    return 0.5 * t2 * cached.q_a + 0.25 * t2 * t2 * cached.v0


def classify(cached: EnergyBreakdown, l2_sq: float) -> NehariClass:
    violation = abs(cached.nehari_j) / max(abs(cached.q_a), abs(cached.v0), 1.0)
    if violation > NEHARI_REL_TOL:
        return NehariClass("OffNehari", violation)
    if abs(cached.v0) <= NZERO_FACTOR * l2_sq * l2_sq:
        return NehariClass("Nzero", violation)
    return NehariClass("Nminus" if cached.v0 < 0 else "Nplus", violation)


def nehari_project(u: Field, cached: EnergyBreakdown) -> Field:
    """sigma(u) = t_u u with t_u = sqrt(-q_a/V0); requires q_a * V0 < 0."""
    if not (cached.q_a * cached.v0 < 0):
        raise OutsideScalingRegionError(
            "outside O: q_a=%.6g, V0=%.6g have q_a*V0 >= 0; rescale via scale_Tt first"
            % (cached.q_a, cached.v0)
        )
    t_u = np.sqrt(-cached.q_a / cached.v0)
    return Field(u.grid, t_u * u.values)


def scale_Tt(u: Field, t: float) -> Field:
    """T_t u(x) = e^-t u(e^-t x), resampled with a cubic spline.

    Mass-preserving in L2 on the continuum; the discrete version carries a
    declared resampling budget (1e-4 on the gradient transform law, 1e-3 on
    the V0 law at |t| = 0.25 for well-resolved states).
    """
    if abs(t) > 2.0:
        raise ScalingClipError("scale_Tt guard: |t| = %.3g > 2" % abs(t))
    if t == 0.0:
        return u
    grid = u.grid
    margin = grid.L * (1.0 - np.exp(-abs(t)))
    band = (np.abs(grid.x1) > grid.L - margin) | (np.abs(grid.x2) > grid.L - margin)
    if np.any(band) and np.max(np.abs(u.values[band])) > 1e-10:
        raise ScalingClipError(
            "scaling would clip support: |u| reaches %.3g inside the boundary band of width %.3g"
            % (float(np.max(np.abs(u.values[band]))), margin)
        )
    scale = np.exp(-t)
    ci = (scale * grid.axis + grid.L) / grid.h
    coords = np.broadcast_arrays(ci[:, None], ci[None, :])
    vals = scale * map_coordinates(u.values, coords, order=3, mode="constant", cval=0.0)
    return Field(grid, vals)


def lambda_map(u: Field, table: KernelTable) -> Field:
    """Normalize to |u|_2 = 1, then scale along T_t to kill V0: t = -V0(u_hat).

    Output lies on Lambda = {|u|_2 = 1, V0(u) = 0} up to an O(h^2)
    resampling residual (|V0| ~ 1e-3 at h = 0.125 for a narrow Gaussian);
    the map is odd by construction.
    """
    l2 = lp_norm(u, 2)
    if l2 <= 1e-14:
        raise FieldDataError("lambda_map undefined at 0")
    uhat = Field(u.grid, u.values / l2)
    usq = Field(u.grid, uhat.values * uhat.values)
    w0 = log_potential(usq, table)
    v0 = float(u.grid.h ** 2 * np.sum(usq.values * w0.values))
    scaled = scale_Tt(uhat, -v0)
    return Field(u.grid, scaled.values / lp_norm(scaled, 2))


def cerami_weight(u: Field, grad_norm_u: float) -> float:
    """||grad_u Phi||_u (1 + |u|_2): the computable stopping functional."""
    return grad_norm_u * (1.0 + lp_norm(u, 2))
