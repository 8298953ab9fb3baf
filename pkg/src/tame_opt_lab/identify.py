"""Active manifolds and the three-condition partial smoothness check.

The candidate manifold at a solution is the equality-active variety
``{x : g_i(x) = 0, i in A}`` near the base point.  When the active gradients
are linearly independent it is a smooth manifold of dimension ``n - |A|``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tolerances as tol
from .cones import directed_distance, normal_cone
from .errors import DegenerateGradientError, InputError, WalkError
from .numerics import null_space_basis, rank_estimate


@dataclass
class ActiveManifold:
    active: tuple
    base_point: np.ndarray
    licq: bool
    rank: int
    tangent_basis: np.ndarray  # (n, dim) orthonormal columns
    dim: int | None

    def summary(self):
        return {"active": list(self.active), "dim_M": self.dim, "licq": self.licq,
                "gradient_rank": self.rank, "base_point": self.base_point.tolist()}


def manifold_at(body, x, active):
    """Candidate active manifold through ``x`` for a given active index set."""
    x = np.asarray(x, dtype=float)
    active = tuple(sorted(int(i) for i in active))
    cone = normal_cone(body, x, active)
    G = cone.generators
    r = rank_estimate(G) if active else 0
    licq = r == len(active)
    basis = null_space_basis(G, body.n) if active else np.eye(body.n)
    return ActiveManifold(active, x, licq, r, basis, body.n - len(active) if licq else None)


def extract_manifold(body, result):
    """Active manifold at the maximizer reported by the solver."""
    return manifold_at(body, result.x, result.active)


def walk_manifold(body, m, direction, radius, max_iter=50):
    """Step ``radius`` along a tangent ``direction`` and project back onto the manifold.

    Gauss-Newton on ``g_A(x) = 0`` with minimum-norm corrections.
    """
    if not m.licq:
        raise InputError("walking requires linearly independent active gradients")
    d = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(d) - 1.0) > 1e-9:
        raise InputError("direction must be a unit vector")
    if radius > 0.1 * body.radius:
        raise InputError(f"radius {radius} exceeds 0.1 R")
    idx = list(m.active)
    x = m.base_point + radius * d
    if not idx:
        return x
    prev = np.inf
    for _ in range(max_iter):
        g, G, _ = body.jets(x)
        gA, GA = g[idx], G[idx]
        res = float(np.abs(gA).max())
        if res <= tol.WALK_TOL:
            break
        if res >= prev:
            raise WalkError(f"Gauss-Newton stalled at residual {res:.3e} (radius {radius})")
        prev = res
        x = x - GA.T @ np.linalg.solve(GA @ GA.T, gA)
    else:
        raise WalkError(f"Gauss-Newton did not reach {tol.WALK_TOL} in {max_iter} iterations")
    if np.linalg.norm(x - m.base_point) > 2 * radius:
        raise WalkError("projected point left the 2*radius neighbourhood; manifold curves too fast")
    return x


@dataclass(frozen=True)
class ProbeOptions:
    radii: tuple = tol.PROBE_RADII
    count: int | None = None  # directions; default 2*dim + 2
    seed: int = 0
    cont_tol: float = tol.CONT_TOL
    cone_samples: int = 16


@dataclass
class PartialSmoothnessVerdict:
    cond_i: bool
    cond_ii: bool
    cond_iii: bool
    status: str  # partly_smooth | not_partly_smooth | inconclusive
    details: dict = field(default_factory=dict)
    pinned: tuple = ()

    @property
    def passed(self):
        return self.cond_i and self.cond_ii and self.cond_iii

    def summary(self):
        return {"cond_i": self.cond_i, "cond_ii": self.cond_ii, "cond_iii": self.cond_iii,
                "status": self.status, "pinned": list(self.pinned), "details": self.details}


def full_active_set(body, x):
    g = body.values(x)
    return tuple(int(i) for i in np.flatnonzero(g >= -body.act_g_tol()))


def tangent_directions(m, count, seed):
    """``+-`` tangent basis vectors followed by seeded random unit tangents."""
    B = m.tangent_basis
    dim = B.shape[1]
    dirs = [s * B[:, k] for k in range(dim) for s in (1.0, -1.0)]
    rng = np.random.Generator(np.random.Philox(key=seed))
    while len(dirs) < count:
        v = B @ rng.standard_normal(dim)
        nrm = np.linalg.norm(v)
        if nrm > 1e-8:
            dirs.append(v / nrm)
    return dirs


def check_partial_smoothness(body, m, probe=None):
    """Three-condition partial smoothness verdict at ``m.base_point`` relative to ``m``.

    (i) LICQ of the active gradients; (ii) normal cones at points walked along
    ``m`` cover the base normal cone and keep the same active set; (iii) the
    span of the base normal cone has dimension ``n - dim M``.
    """
    probe = probe or ProbeOptions()
    n = body.n
    xbar = m.base_point
    base_active = tuple(sorted(set(m.active) | set(full_active_set(body, xbar))))
    details = {"base_active": list(base_active), "gradient_rank": m.rank, "active": list(m.active)}
    if not m.licq:
        details["reason"] = (f"active gradients have rank {m.rank} < {len(m.active)} constraints: "
                             "no single active manifold")
        return PartialSmoothnessVerdict(False, False, False, "not_partly_smooth", details)

    base_cone = normal_cone(body, xbar, base_active)
    span = base_cone.span_rank
    cond_iii = span == n - m.dim
    details["base_span_rank"] = span
    details["normal_space_dim"] = n - m.dim

    if m.dim == 0:
        details["probes"] = []
        return PartialSmoothnessVerdict(True, True, cond_iii,
                                        "partly_smooth" if cond_iii else "not_partly_smooth",
                                        details, pinned=tuple(range(n)))

    count = probe.count if probe.count is not None else 2 * m.dim + 2
    dirs = tangent_directions(m, count, probe.seed)
    probes = []
    max_dist = {r: 0.0 for r in probe.radii}
    ok = {r: 0 for r in probe.radii}
    active_constant = True
    witness = None
    walked = []
    r_small = min(probe.radii)
    r_big = max(probe.radii)
    for r in probe.radii:
        for k, d in enumerate(dirs):
            rec = {"radius": r, "direction": d.tolist()}
            try:
                xr = walk_manifold(body, m, d, r)
            except WalkError as exc:
                rec["error"] = str(exc)
                probes.append(rec)
                continue
            act_r = full_active_set(body, xr)
            rec["active"] = list(act_r)
            if float(body.values(xr).max()) > body.act_g_tol():
                rec["infeasible"] = True
                active_constant = False
            if tuple(act_r) != tuple(m.active):
                active_constant = False
            try:
                cone_r = normal_cone(body, xr, act_r)
                dist, wit = directed_distance(base_cone, cone_r, probe.cone_samples,
                                              probe.seed + k, return_witness=True)
            except DegenerateGradientError as exc:
                rec["error"] = str(exc)
                probes.append(rec)
                continue
            rec["distance"] = dist
            ok[r] += 1
            if dist >= max_dist[r]:
                max_dist[r] = dist
                if r == r_small:
                    witness = wit
            walked.append(xr)
            probes.append(rec)
    details["probes"] = probes
    details["max_distance"] = {str(r): max_dist[r] for r in probe.radii}
    details["witness_direction"] = None if witness is None else witness.tolist()
    details["active_constant"] = active_constant
    if ok[r_small] == 0:
        return PartialSmoothnessVerdict(True, False, cond_iii, "inconclusive", details)
    cond_ii = active_constant and max_dist[r_small] <= probe.cont_tol
    # coordinates constant along M: no spread among the walked points
    spread = np.ptp(np.array(walked), axis=0) if walked else np.full(n, np.inf)
    pinned = tuple(int(j) for j in np.flatnonzero(spread <= tol.PIN_TOL * r_big))
    status = "partly_smooth" if (cond_ii and cond_iii) else "not_partly_smooth"
    return PartialSmoothnessVerdict(True, cond_ii, cond_iii, status, details, pinned=pinned)


def signature(m, verdict=None):
    """Compact label of the active manifold: active indices plus coordinates constant along it.

    Two manifolds can share an active index set yet be different branches of
    the same variety; the pinned coordinates tell them apart.
    """
    act = ",".join(str(i) for i in m.active)
    if not m.licq:
        return f"{act}|nolicq"
    if verdict is None:
        return act
    return f"{act}|pin:{','.join(str(j) for j in verdict.pinned)}"
