"""Strong criticality and sensitivity of the solution map ``c -> x_c``.

A maximizer ``x_c`` of ``<c, .>`` is *strong* when

    <c, x_c> >= <c, x> + delta * ||x - x_c||^2     for feasible x near x_c

for some ``delta > 0``.  The constant is estimated from below by sampling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tolerances as tol
from .cones import normal_cone, strict_complementarity
from .errors import InputError, SamplingError, SecondOrderDegeneracyError, SingularMatrixError, WalkError
from .identify import tangent_directions, walk_manifold
from .numerics import rank_estimate, solve_symmetric
from .solver import maximize_linear

MAXIMALITY_TOL = 1e-7
BISECT_ITERS = 50


@dataclass
class CriticalityReport:
    """Strict complementarity and quadratic-decay evidence at a maximizer.

    ``delta_hat`` is the smallest sampled ratio ``<c, x_c - x> / ||x - x_c||^2``
    clamped at zero; ``None`` when there is nothing to sample (a 0-dimensional
    manifold).  ``violations`` counts samples that beat ``x_c`` by more than
    ``1e-7``.
    """

    strict_comp: str | None = None
    t_star: float | None = None
    delta_hat: float | None = None
    decay_radius: float = 0.0
    samples_used: int = 0
    min_ratio_witness: list | None = None
    min_ratio: float | None = None
    violations: int = 0
    max_violation: float = 0.0
    strong: bool | None = None

    def summary(self):
        return {
            "strict_comp": self.strict_comp,
            "t_star": _num(self.t_star),
            "delta_hat": _num(self.delta_hat),
            "decay_radius": self.decay_radius,
            "samples_used": self.samples_used,
            "min_ratio_witness": self.min_ratio_witness,
            "min_ratio": _num(self.min_ratio),
            "violations": self.violations,
            "max_violation": self.max_violation,
            "strong": self.strong,
        }


@dataclass
class SensitivityReport:
    jac_fd: np.ndarray
    jac_kkt: np.ndarray
    discrepancy: float
    jac_rank: int
    manifold_dim: int
    supported: bool = True
    h: float = 1e-4
    notes: list = field(default_factory=list)

    def summary(self):
        return {
            "jac_fd": self.jac_fd.tolist(),
            "jac_kkt": self.jac_kkt.tolist(),
            "discrepancy": self.discrepancy,
            "jac_rank": self.jac_rank,
            "manifold_dim": self.manifold_dim,
            "supported": self.supported,
            "h": self.h,
        }


def _num(v):
    if v is None:
        return None
    v = float(v)
    return None if np.isnan(v) else v


def _ratios(c, xc, X):
    D = X - xc
    d2 = np.einsum("ij,ij->i", D, D)
    num = (xc - X) @ c
    return num, d2


def _summarize(c, xc, X, radius):
    num, d2 = _ratios(c, xc, X)
    keep = d2 > 1e-12
    num, d2, X = num[keep], d2[keep], X[keep]
    if num.size == 0:
        return None
    ratio = num / d2
    k = int(np.argmin(ratio))
    viol = num < -MAXIMALITY_TOL
    return CriticalityReport(
        delta_hat=max(0.0, float(ratio[k])),
        decay_radius=float(radius),
        samples_used=int(num.size),
        min_ratio_witness=X[k].tolist(),
        min_ratio=float(ratio[k]),
        violations=int(viol.sum()),
        max_violation=float(-num[viol].min()) if viol.any() else 0.0,
    )


def quadratic_decay(body, result, radius, count=200, seed=0, bisect_iters=BISECT_ITERS):
    """Sampled lower estimate of the decay constant over ``F ∩ B(x_c, radius)``.

    Draws ``count`` seeded uniform points of the ball around ``x_c``.  An
    infeasible draw ``y`` is replaced by the last feasible point on the segment
    from an interior anchor (halfway between ``x_c`` and the body's interior
    point) towards ``y``, located by bisection.
    """
    if not 0 < radius <= body.radius:
        raise InputError(f"radius must lie in (0, {body.radius}]")
    if count < 100:
        raise InputError("count must be at least 100")
    c = np.asarray(result.c, dtype=float)
    xc = np.asarray(result.x, dtype=float)
    n = body.n
    rng = np.random.Generator(np.random.Philox(key=seed))
    z = rng.standard_normal((count, n))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    Y = xc + z * (radius * rng.random((count, 1)) ** (1.0 / n))
    feas = np.all(body.values(Y) <= 0.0, axis=1)
    anchor = xc + 0.5 * (body.interior_point - xc)
    bad = ~feas
    if bad.any():
        D = Y[bad] - anchor
        lo = np.zeros(D.shape[0])
        hi = np.ones(D.shape[0])
        for _ in range(bisect_iters):
            mid = 0.5 * (lo + hi)
            ok = np.all(body.values(anchor + mid[:, None] * D) <= 0.0, axis=1)
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
        Y[bad] = anchor + lo[:, None] * D
    rep = _summarize(c, xc, Y, radius)
    if rep is None or rep.samples_used < 10:
        raise SamplingError("fewer than 10 usable samples; radius too small relative to F")
    return rep


def decay_along_manifold(body, result, m, radius=None, count=None, seed=0):
    """Decay ratios at points of ``m`` reached by walks of several radii up to ``radius``."""
    radius = min(0.1 * body.radius, 0.1) if radius is None else radius
    count = 2 * m.dim + 4 if count is None else count
    # eigenvectors of the reduced Lagrangian Hessian hold the extreme second-order ratios
    B = m.tangent_basis
    W = _lagrangian_hessian(body, result.x, result.lam, m.active)
    _, V = np.linalg.eigh(B.T @ W @ B)
    dirs = [s * (B @ V[:, k]) for k in range(V.shape[1]) for s in (1.0, -1.0)]
    dirs += tangent_directions(m, count, seed)
    pts = []
    for r in radius * np.array([1.0, 0.5, 0.25, 0.1, 0.05]):
        for d in dirs:
            try:
                x = walk_manifold(body, m, d, r)
            except WalkError:
                continue
            if float(body.values(x).max()) <= body.act_g_tol():
                pts.append(x)
    rep = _summarize(np.asarray(result.c, float), np.asarray(result.x, float),
                     np.array(pts).reshape(-1, body.n), radius) if pts else None
    if rep is None:
        raise SamplingError("no walked manifold point stayed feasible")
    return rep


def strong_criticality(body, result, m, radius=None, count=None, seed=0):
    """Strict complementarity on the active cone plus quadratic decay along ``m``."""
    if not m.licq:
        raise InputError("strong criticality needs a manifold with independent active gradients")
    cone = normal_cone(body, result.x, m.active)
    verdict, t_star = strict_complementarity(cone, result.c)
    if m.dim == 0:
        rep = CriticalityReport(decay_radius=0.0)
    else:
        rep = decay_along_manifold(body, result, m, radius, count, seed)
    rep.strict_comp = verdict
    rep.t_star = t_star
    rep.strong = verdict == "interior" and (rep.delta_hat is None or rep.delta_hat > tol.DELTA_TOL)
    return rep


def _lagrangian_hessian(body, x, lam, active):
    idx = list(active)
    _, _, H = body.jets(np.asarray(x, float))
    if not idx:
        return np.zeros((body.n, body.n))
    return np.tensordot(np.asarray(lam, float)[idx], H[idx], axes=1)


def kkt_jacobian(body, x, lam, active):
    """Implicit-function Jacobian of ``c -> x_c`` from the bordered KKT system on ``g_A = 0``."""
    n = body.n
    idx = list(active)
    _, G, _ = body.jets(x)
    GA = G[idx]
    W = _lagrangian_hessian(body, x, lam, active)
    k = len(idx)
    K = np.zeros((n + k, n + k))
    K[:n, :n] = W
    K[:n, n:] = GA.T
    K[n:, :n] = GA
    J = np.zeros((n, n))
    for j in range(n):
        rhs = np.zeros(n + k)
        rhs[j] = 1.0
        try:
            J[:, j] = solve_symmetric(K, rhs)[:n]
        except SingularMatrixError as exc:
            raise SecondOrderDegeneracyError(
                f"bordered KKT system singular (pivot {exc.pivot_index}); "
                "second-order sufficiency fails numerically"
            ) from exc
    return J


def sensitivity(body, c, m, h=1e-4, result=None, opts=None, crit=None):
    """Finite-difference versus KKT-predicted Jacobian of the solution map at ``c``.

    Both are compared on the block orthogonal to ``c`` (the map is constant
    along the ray through ``c``).  The report is marked unsupported when ``c``
    is not strongly critical.
    """
    c = np.asarray(c, dtype=float)
    n = body.n
    if result is None:
        result = maximize_linear(body, c, opts)
    if crit is None:
        crit = strong_criticality(body, result, m)
    J_kkt = kkt_jacobian(body, result.x, result.lam, m.active)
    J_fd = np.zeros((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        xp = maximize_linear(body, c + e, opts).x
        xm = maximize_linear(body, c - e, opts).x
        J_fd[:, j] = (xp - xm) / (2 * h)
    u = c / np.linalg.norm(c)
    P = np.eye(n) - np.outer(u, u)
    disc = float(np.abs((J_fd - J_kkt) @ P).max())
    return SensitivityReport(
        jac_fd=J_fd, jac_kkt=J_kkt, discrepancy=disc,
        jac_rank=rank_estimate(J_kkt) if np.abs(J_kkt).max() > 0 else 0,
        manifold_dim=m.dim, supported=bool(crit.strong), h=h,
    )
