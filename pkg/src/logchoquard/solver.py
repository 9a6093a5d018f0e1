"""Nehari-constrained descent and the multistart search for symmetric solutions.

The descent minimizes Phi on the constraint {J = q_a + V0 = 0, V0 < 0}: at
each iterate it solves for the metric (Riesz) gradient, removes the
component along the constraint gradient, takes an Armijo-backtracked step,
and reprojects onto the manifold along the ray (exact by homogeneity:
q_a -> t^2 q_a, V0 -> t^4 V0). Starts come from families of disjoint
mollifier bumps placed and symmetrized according to the group action,
combined over the unit simplex of signed coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import List, Optional

import numpy as np

from .barycenter import beta as barycenter_beta
from .errors import (
    AdmissibilityError,
    DegenerateNehariError,
    GroundStateError,
    LineSearchError,
    OutsideScalingRegionError,
    RieszSolveError,
    ScalingClipError,
    StartFamilyError,
)
from .field import Field, bump_field, gaussian_field, lp_norm, neg_laplacian
from .functionals import (
    EnergyBreakdown,
    NehariClass,
    Potential,
    classify,
    energy,
    q_a_bilinear,
    scale_Tt,
)
from .logkernel import KernelTable, b_form, log_potential, padded_convolve
from .metric import (
    MetricContext,
    inner_u,
    metric_context_at,
    norm_u,
    solve_metric_system,
)
from .symmetry import (
    GroupAction,
    InvarianceCertificate,
    KIND_GLIDE,
    KIND_LATTICE,
    KIND_RADIAL,
    KIND_ROTATION,
    check_admissible,
    is_invariant,
    orbit_distance,
    project_invariant,
    trivial_action,
)

DEDUP_REL = 1e-4  # orbit_distance <= DEDUP_REL * |u|_2 collapses two results
REPROJECT_EVERY = 25  # invariant reprojection cadence (fp drift control)
LBFGS_MEMORY = 8  # curvature pairs kept for the two-loop direction


def _lbfgs_two_loop(w: np.ndarray, pairs) -> np.ndarray:
    """Two-loop recursion over flattened (s, y, 1/s.y) pairs, newest last.

    w is already metric-preconditioned, so flat dot products are the right
    pairing and the newest-pair scaling plays the Barzilai-Borwein role.
    """
    q = w.ravel().copy()
    coeffs = []
    for s, y, rho in reversed(pairs):
        a = rho * float(np.dot(s, q))
        q -= a * y
        coeffs.append(a)
    s, y, _ = pairs[-1]
    q *= float(np.dot(s, y) / np.dot(y, y))
    for (s, y, rho), a in zip(pairs, reversed(coeffs)):
        b = rho * float(np.dot(y, q))
        q += (a - b) * s
    return q.reshape(w.shape)


@dataclass(frozen=True)
class SolveConfig:
    max_iters: int = 1200
    cerami_tol: float = 1e-6
    riesz_tol: float = 1e-10
    step_init: float = 1.0
    backtrack_factor: float = 0.5
    armijo_c: float = 1e-4
    tau_split: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        for name in ("cerami_tol", "riesz_tol", "step_init"):
            if getattr(self, name) <= 0:
                raise ValueError("%s must be > 0" % name)
        if not (0 < self.backtrack_factor < 1):
            raise ValueError("backtrack_factor must lie in (0, 1)")
        if not (0 < self.armijo_c < 1):
            raise ValueError("armijo_c must lie in (0, 1)")
        if self.tau_split < 0:
            raise ValueError("tau_split must be >= 0")


@dataclass
class SolveResult:
    u: Field
    breakdown: EnergyBreakdown
    cerami: float
    nehari: NehariClass
    certificate: InvarianceCertificate
    iters: int
    converged: bool
    trace: List[tuple] = dc_field(default_factory=list)
    start_index: Optional[int] = None


@dataclass(frozen=True)
class StartFamily:
    bumps: List[Field]
    simplex_samples: List[np.ndarray]


TRACE_COLUMNS = ("iter", "phi", "q_a", "v0", "nehari_j", "cerami_weight", "residual_l2")


def tangent_project(
    u: Field,
    g: Field,
    ctx: MetricContext,
    pot: Potential,
    table: KernelTable,
    riesz_tol: float = 1e-10,
) -> Field:
    """Remove from g its metric component along the Riesz representative of J'."""
    grid = u.grid
    w0 = log_potential(Field(grid, u.values * u.values), table)
    r = neg_laplacian(u.values, grid.h) + (pot.a.values + w0.values) * u.values
    j_field = 2.0 * r + 2.0 * w0.values * u.values
    eta_vals, rel = solve_metric_system(ctx, j_field, riesz_tol)
    if rel > riesz_tol:
        raise RieszSolveError("constraint-gradient solve stalled at %.3g" % rel, residual=rel)
    eta = Field(grid, eta_vals)
    denom = inner_u(ctx, eta, eta)
    if denom <= 1e-28:
        raise DegenerateNehariError("degenerate constraint gradient: ||J'||_u ~ 0")
    coeff = inner_u(ctx, g, eta) / denom
    return Field(grid, g.values - coeff * eta.values)


def _lean_energy(vals: np.ndarray, pot: Potential, table: KernelTable):
    """(q_a, V0, w0) with a single convolution, on raw samples."""
    grid = pot.a.grid
    h = grid.h
    d1 = np.diff(vals, axis=0, prepend=0.0, append=0.0) / h
    d2 = np.diff(vals, axis=1, prepend=0.0, append=0.0) / h
    u_sq = vals * vals
    qa = h * h * (np.sum(d1 * d1) + np.sum(d2 * d2) + np.sum(pot.a.values * u_sq))
    w0 = padded_convolve(grid, u_sq, table.k0_hat)
    v0 = h * h * np.sum(u_sq * w0)
    return float(qa), float(v0), w0


def _nzero_guard(v0: float, vals: np.ndarray, h: float):
    l2_sq = h * h * np.sum(vals * vals)
    if abs(v0) <= 1e-8 * l2_sq * l2_sq:
        raise DegenerateNehariError(
            "degenerate Nehari direction: |V0| = %.3g below threshold" % abs(v0)
        )


def _finish(u_vals, pot, table, action, cerami, iters, converged, trace) -> SolveResult:
    u = Field(pot.a.grid, u_vals.copy())
    breakdown = energy(u, pot, table)
    return SolveResult(
        u=u,
        breakdown=breakdown,
        cerami=float(cerami),
        nehari=classify(breakdown, lp_norm(u, 2) ** 2),
        certificate=is_invariant(u, action),
        iters=iters,
        converged=converged,
        trace=trace,
    )


def descend(
    u0: Field,
    action: GroupAction,
    pot: Potential,
    table: KernelTable,
    cfg: SolveConfig,
) -> SolveResult:
    """Constrained descent from u0; see module docstring for the iteration."""
    grid = pot.a.grid
    h = grid.h
    project = action.has_projection

    u = u0.values.copy()
    if project:
        u = project_invariant(Field(grid, u), action).values
        if np.sqrt(np.sum(u * u)) * h <= 1e-14:
            raise DegenerateNehariError("invariant projection annihilated the start")

    qa, v0, w0 = _lean_energy(u, pot, table)
    if not (qa * v0 < 0):
        raise OutsideScalingRegionError(
            "start outside O: q_a=%.6g, V0=%.6g; rescale via scale_Tt first" % (qa, v0)
        )
    _nzero_guard(v0, u, h)
    t = np.sqrt(-qa / v0)
    u *= t
    qa, v0, w0 = t * t * qa, t ** 4 * v0, t * t * w0
    phi = 0.5 * qa + 0.25 * v0

    trace: List[tuple] = []
    g_prev = None
    eta_prev = None
    u_last = None
    w_last = None
    pairs: List[tuple] = []
    alpha = cfg.step_init
    cerami = np.inf
    accepted = 0

    for it in range(cfg.max_iters):
        center = barycenter_beta(Field(grid, u))
        ctx = metric_context_at(grid, center)

        r = neg_laplacian(u, h) + (pot.a.values + w0) * u
        res_l2 = float(np.sqrt(np.sum(r * r)) * h)

        g_vals, rel = solve_metric_system(ctx, r, cfg.riesz_tol, x0=g_prev)
        if rel > cfg.riesz_tol:
            err = RieszSolveError("metric solve stalled at %.3g" % rel, residual=rel)
            err.result = _finish(u, pot, table, action, cerami, accepted, False, trace)
            raise err
        g_prev = g_vals
        g = Field(grid, g_vals)
        if project:
            g = project_invariant(g, action)

        l2_u = float(np.sqrt(np.sum(u * u)) * h)
        cerami = norm_u(ctx, g) * (1.0 + l2_u)
        trace.append((it, phi, qa, v0, qa + v0, cerami, res_l2))

        if cerami <= cfg.cerami_tol:
            return _finish(u, pot, table, action, cerami, accepted, True, trace)

        j_field = 2.0 * r + 2.0 * w0 * u
        eta_vals, rel = solve_metric_system(ctx, j_field, cfg.riesz_tol, x0=eta_prev)
        if rel > cfg.riesz_tol:
            err = RieszSolveError("constraint solve stalled at %.3g" % rel, residual=rel)
            err.result = _finish(u, pot, table, action, cerami, accepted, False, trace)
            raise err
        eta_prev = eta_vals
        eta = Field(grid, eta_vals)
        if project:
            eta = project_invariant(eta, action)

        denom = inner_u(ctx, eta, eta)
        if denom <= 1e-28:
            err = DegenerateNehariError("degenerate constraint gradient along the path")
            err.result = _finish(u, pot, table, action, cerami, accepted, False, trace)
            raise err
        w = g.values - (inner_u(ctx, g, eta) / denom) * eta.values
        wn2 = inner_u(ctx, Field(grid, w), Field(grid, w))

        # the wells of a structured potential make the on-manifold curvature
        # strongly anisotropic and plain preconditioned descent crawls along
        # the soft modes, so the step direction comes from an L-BFGS two-loop
        # over recent (s, y) pairs; the Armijo test below still guarantees
        # monotone decrease, and any non-descent proposal falls back to w.
        if u_last is not None:
            s_vec = (u - u_last).ravel()
            y_vec = (w - w_last).ravel()
            sy = float(np.dot(s_vec, y_vec))
            if sy > 1e-12 * float(np.linalg.norm(s_vec) * np.linalg.norm(y_vec)):
                pairs.append((s_vec, y_vec, 1.0 / sy))
                if len(pairs) > LBFGS_MEMORY:
                    pairs.pop(0)
        u_last = u.copy()
        w_last = w.copy()

        d = w
        dw = wn2
        if pairs:
            d = _lbfgs_two_loop(w, pairs)
            d = d - (inner_u(ctx, Field(grid, d), eta) / denom) * eta.values
            dn2 = inner_u(ctx, Field(grid, d), Field(grid, d))
            dw = inner_u(ctx, Field(grid, w), Field(grid, d))
            if not dw > 1e-10 * np.sqrt(wn2 * dn2):
                d = w
                dw = wn2

        # exact expansions along the ray u - alpha*d:
        #   q_a: quadratic in alpha; V0: quartic in alpha. Evaluating the
        # on-manifold decrease from these coefficients avoids the large-scale
        # cancellation that floors a direct re-evaluation of Phi.
        d1u = np.diff(u, axis=0, prepend=0.0, append=0.0)
        d2u = np.diff(u, axis=1, prepend=0.0, append=0.0)
        d1w = np.diff(d, axis=0, prepend=0.0, append=0.0)
        d2w = np.diff(d, axis=1, prepend=0.0, append=0.0)
        c1 = float(np.sum(d1u * d1w) + np.sum(d2u * d2w)) + h * h * float(
            np.sum(pot.a.values * u * d)
        )
        c2 = float(np.sum(d1w * d1w) + np.sum(d2w * d2w)) + h * h * float(
            np.sum(pot.a.values * d * d)
        )
        cross = u * d
        wsq = d * d
        kcross = padded_convolve(grid, cross, table.k0_hat)
        kwsq = padded_convolve(grid, wsq, table.k0_hat)
        h2 = h * h
        b0c = h2 * float(np.sum(cross * w0))
        b0w = h2 * float(np.sum(wsq * w0))
        bcc = h2 * float(np.sum(cross * kcross))
        bcw = h2 * float(np.sum(wsq * kcross))
        bww = h2 * float(np.sum(wsq * kwsq))

        alpha = cfg.step_init if len(pairs) > 0 else min(
            cfg.step_init, alpha / cfg.backtrack_factor
        )
        accepted_step = False
        for _ in range(60):
            dq = -2.0 * alpha * c1 + alpha * alpha * c2
            qa_t = qa + dq
            dv = (
                -4.0 * alpha * b0c
                + alpha * alpha * (4.0 * bcc + 2.0 * b0w)
                - 4.0 * alpha ** 3 * bcw
                + alpha ** 4 * bww
            )
            v0_t = v0 + dv
            if qa_t > 0 and v0_t < 0:
                # Phi(sigma(x)) = -q_a(x)^2 / (4 V0(x)); difference without
                # squaring the large baselines
                dphi = (-2.0 * qa * v0 * dq - v0 * dq * dq + qa * qa * dv) / (
                    4.0 * v0_t * v0
                )
                if dphi <= -cfg.armijo_c * alpha * dw:
                    tt = np.sqrt(-qa_t / v0_t)
                    u = tt * (u - alpha * d)
                    w0 = tt * tt * (w0 - 2.0 * alpha * kcross + alpha * alpha * kwsq)
                    qa, v0 = tt * tt * qa_t, tt ** 4 * v0_t
                    phi += dphi
                    accepted_step = True
                    accepted += 1
                    break
            alpha *= cfg.backtrack_factor
        if not accepted_step:
            err = LineSearchError("Armijo backtracking exhausted after 60 halvings")
            err.result = _finish(u, pot, table, action, cerami, accepted, False, trace)
            raise err

        _nzero_guard(v0, u, h)

        if (it + 1) % REPROJECT_EVERY == 0:
            # refresh the incrementally tracked scalars (and the invariant
            # subspace membership) to cap floating-point drift
            if project:
                u = project_invariant(Field(grid, u), action).values
            qa, v0, w0 = _lean_energy(u, pot, table)
            if not (qa * v0 < 0):
                err = OutsideScalingRegionError("reprojection left O")
                err.result = _finish(u, pot, table, action, cerami, accepted, False, trace)
                raise err
            t = np.sqrt(-qa / v0)
            u *= t
            qa, v0, w0 = t * t * qa, t ** 4 * v0, t * t * w0
            phi = 0.5 * qa + 0.25 * v0

    return _finish(u, pot, table, action, cerami, accepted, False, trace)


# ---------------------------------------------------------------------------
# start families


def _bump_sites(action: GroupAction, grid, k: int):
    """Centers and radius (in length units) for k+1 disjoint bumps."""
    h = grid.h
    if action.kind == KIND_LATTICE:
        b1 = np.array(action.cells1, dtype=float) * h
        b2 = np.array(action.cells2, dtype=float) * h
    else:
        # free placement: widen the pattern on coarse grids so bumps resolve
        s = max(1.0, 8.0 * h)
        b1 = np.array([s, 0.0])
        b2 = np.array([0.0, s])
    # seed fractions visit inequivalent sites of the lattice (half-cell, origin,
    # quarter-diagonal, conjugate half-cell, and a pure lattice translate)
    fractions = [
        (0.5, 0.0),
        (2.0, 0.0),
        (-1.25, 0.25),
        (0.0, -1.5),
        (-2.5, 0.0),
        (1.5, 1.5),
        (-1.5, 1.5),
        (1.5, -1.5),
    ]
    if k + 1 > len(fractions):
        raise StartFamilyError("bump catalog supports at most %d bumps" % len(fractions))
    centers = [f1 * b1 + f2 * b2 for f1, f2 in fractions[: k + 1]]
    sep = min(
        float(np.hypot(*(ci - cj)))
        for i, ci in enumerate(centers)
        for j, cj in enumerate(centers)
        if i < j
    ) if k else np.inf
    scale = min(np.hypot(*b1), np.hypot(*b2), 1.0)
    # prefer 0.45 cell units, but grow on coarse grids up to the disjointness cap
    radius = min(0.48 * (sep - 2 * h), max(0.45 * scale, 3.5 * h))
    return centers, radius


def make_bump_family(
    k: int,
    action: GroupAction,
    pot: Potential,
    table: KernelTable,
    cfg: SolveConfig,
) -> StartFamily:
    """k+1 invariant bumps with disjoint supports plus signed simplex samples.

    Bumps are jointly rescaled along T_t (t < 0) until every simplex sample
    satisfies q_a > 0 and V0 < 0, mirroring the disjoint-support start
    construction of the multiplicity argument.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    grid = pot.a.grid
    h = grid.h
    # keep supports clear of the T_t clip band so the joint rescale below
    # can always take at least one step
    fit_limit = grid.L - max(1.0, grid.L * (1.0 - np.exp(-0.25)))

    if action.kind == KIND_RADIAL:
        # ring spacing widens on coarse grids so each annulus stays resolved
        spacing = max(0.8, 9.0 * h)
        radii = [0.9 + spacing * j for j in range(k + 1)]
        width = min(0.45 * (spacing - 2 * h), max(0.3, 3.5 * h))
        if width < 3 * h:
            raise StartFamilyError("grid too coarse for disjoint annular bumps")
        if radii[-1] + width > fit_limit:
            raise StartFamilyError("%d annular bumps do not fit the box" % (k + 1))
        bumps = []
        for R in radii:
            s2 = ((grid.r - R) / width) ** 2
            vals = np.zeros_like(s2)
            inside = s2 < 1.0
            vals[inside] = np.exp(1.0 - 1.0 / (1.0 - s2[inside]))
            bumps.append(Field(grid, vals))
    elif action.kind == KIND_ROTATION:
        m = action.m
        chord = 2.0 * np.sin(np.pi / (2 * m)) if m > 1 else 2.0
        bumps = []
        for j in range(k + 1):
            R = 1.2 + 0.9 * j
            rad = min(0.4, 0.45 * (R * chord - 2 * h))
            if k >= 1:
                rad = min(rad, 0.45 * (0.9 - 2 * h))  # keep annuli disjoint
            if rad < 3 * h:
                raise StartFamilyError("grid too coarse for disjoint sector bumps")
            if R + rad > fit_limit:
                raise StartFamilyError("%d sector bumps do not fit the box" % (k + 1))
            seed_bump = bump_field(grid, center=(R, 0.0), radius=rad)
            sym = project_invariant(seed_bump, action)
            if lp_norm(sym, 2) <= 1e-14:
                raise StartFamilyError("invariant projection annihilated a sector bump")
            bumps.append(sym)
    elif action.kind == KIND_GLIDE:
        offset = 0.9 if action.zeta_nontrivial else 0.0
        rad = 0.5
        bumps = []
        for j in range(k + 1):
            c1 = (j - 0.5 * k) * 1.6
            if abs(c1) + rad > fit_limit or offset + rad > fit_limit:
                raise StartFamilyError("%d glide bumps do not fit the box" % (k + 1))
            seed_bump = bump_field(grid, center=(c1, offset), radius=rad)
            sym = project_invariant(seed_bump, action)
            if lp_norm(sym, 2) <= 1e-14:
                raise StartFamilyError("invariant projection annihilated a glide bump")
            bumps.append(sym)
    else:
        centers, radius = _bump_sites(action, grid, k)
        if radius < 3 * h:
            raise StartFamilyError("grid too coarse for disjoint bumps (radius %.3g)" % radius)
        for c in centers:
            if np.max(np.abs(c)) + radius > fit_limit:
                raise StartFamilyError("%d bumps do not fit the box" % (k + 1))
        bumps = [bump_field(grid, center=tuple(c), radius=radius) for c in centers]

    rng = np.random.default_rng(cfg.seed)
    samples = [np.eye(k + 1)[j] for j in range(k + 1)]
    for i in range(k + 1):
        for j in range(i + 1, k + 1):
            mid = np.zeros(k + 1)
            mid[i] = mid[j] = 0.5
            samples.append(mid)
    for _ in range(max(2, k)):
        s = rng.standard_normal(k + 1)
        while np.sum(np.abs(s)) <= 1e-12:
            s = rng.standard_normal(k + 1)
        samples.append(s / np.sum(np.abs(s)))

    # joint T_t rescaling (t < 0) until every sample lies in O, then onward
    # while the worst projected energy still improves: stopping at the first
    # O-entry leaves V0 barely negative, and sigma-projection catapults such
    # samples to enormous energies whose transients dominate the descent
    def worst_phi(bump_list):
        qa_mat = np.array(
            [[q_a_bilinear(bi, bj, pot) for bj in bump_list] for bi in bump_list]
        )
        sq = [Field(grid, b.values * b.values) for b in bump_list]
        v_mat = np.array([[b_form(si, sj, "B0", table) for sj in sq] for si in sq])
        worst = 0.0
        for s in samples:
            qa_s = float(s @ qa_mat @ s)
            v0_s = float((s * s) @ v_mat @ (s * s))
            if not (qa_s > 0 and v0_s < 0):
                return np.inf
            worst = max(worst, -qa_s * qa_s / (4.0 * v0_s))
        return worst

    def rescaled(bump_list):
        try:
            out = [scale_Tt(b, -0.25) for b in bump_list]
        except ScalingClipError as exc:
            raise StartFamilyError(
                "rescaling the start family hit the boundary band (%s); "
                "enlarge the box" % exc
            ) from exc
        if action.kind in (KIND_RADIAL, KIND_ROTATION, KIND_GLIDE):
            # spline resampling breaks exact invariance; restore it
            out = [project_invariant(b, action) for b in out]
        return out

    t_total = 0.0
    phi_now = worst_phi(bumps)
    while not np.isfinite(phi_now):
        t_total -= 0.25
        if t_total < -2.0:
            raise StartFamilyError(
                "cannot satisfy q_a > 0 and V0 < 0 within the scaling guard; "
                "enlarge the box or reduce k"
            )
        bumps = rescaled(bumps)
        phi_now = worst_phi(bumps)
    while t_total > -2.0:
        deeper = rescaled(bumps)
        phi_deeper = worst_phi(deeper)
        if not phi_deeper < phi_now:
            break
        bumps = deeper
        phi_now = phi_deeper
        t_total -= 0.25

    return StartFamily(bumps=bumps, simplex_samples=samples)


def multistart_search(
    k: int,
    action: GroupAction,
    pot: Potential,
    table: KernelTable,
    cfg: SolveConfig,
) -> List[SolveResult]:
    """Descend from every simplex sample; dedup by orbit distance; sort by Phi."""
    ok, reason = check_admissible(action)
    if not ok and pot.ess_inf <= 0:
        raise AdmissibilityError(
            "action not admissible (%s) and ess inf a = %.3g <= 0" % (reason, pot.ess_inf)
        )
    family = make_bump_family(k, action, pot, table, cfg)
    grid = pot.a.grid

    results: List[SolveResult] = []
    for idx, s in enumerate(family.simplex_samples):
        vals = np.zeros((grid.n, grid.n))
        for coeff, b in zip(s, family.bumps):
            vals += coeff * b.values
        u0 = Field(grid, vals)
        try:
            res = descend(u0, action, pot, table, cfg)
        except (LineSearchError, RieszSolveError, DegenerateNehariError, OutsideScalingRegionError) as exc:
            res = getattr(exc, "result", None)
            if res is None:
                continue
        res.start_index = idx
        results.append(res)

    results.sort(key=lambda r: r.breakdown.phi)
    kept: List[SolveResult] = []
    for res in results:
        dup = False
        for other in kept:
            thresh = DEDUP_REL * lp_norm(other.u, 2)
            if orbit_distance(res.u, other.u) <= thresh:
                dup = True
                break
        if not dup:
            kept.append(res)
    return kept


def ground_state(
    action: GroupAction,
    pot: Potential,
    table: KernelTable,
    cfg: SolveConfig,
) -> SolveResult:
    """Minimum-energy critical point under ess inf a > 0: multistart k=2 plus
    a radial Gaussian start; returns the lowest-Phi converged result."""
    if pot.ess_inf <= 0:
        raise GroundStateError(
            "indefinite potential: global minimality not certified; use multistart_search"
        )
    results = multistart_search(2, action, pot, table, cfg)

    grid = pot.a.grid
    gauss_result = None
    for width in (0.7, 0.5, 0.35):
        g0 = gaussian_field(grid, width=width)
        if action.has_projection:
            g0 = project_invariant(g0, action)
            if lp_norm(g0, 2) <= 1e-12:
                break
        bk = energy(g0, pot, table)
        if not (bk.q_a * bk.v0 < 0):
            continue
        try:
            gauss_result = descend(g0, action, pot, table, cfg)
        except (LineSearchError, RieszSolveError, DegenerateNehariError) as exc:
            gauss_result = getattr(exc, "result", None)
        break
    if gauss_result is not None:
        results.append(gauss_result)

    converged = [r for r in results if r.converged]
    if not converged:
        raise GroundStateError("no start converged within the iteration budget")
    best = min(converged, key=lambda r: r.breakdown.phi)
    if not (best.breakdown.phi > 0):
        raise GroundStateError("ground state energy is not positive: %.6g" % best.breakdown.phi)
    return best
