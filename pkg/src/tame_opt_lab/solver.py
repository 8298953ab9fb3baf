"""Log-barrier path following for ``max <c, x>`` over a :class:`ConvexBody`.

For decreasing ``mu`` the barrier merit ``-<c, x> - mu * sum(log(-g_i(x)))``
is minimized by damped Newton.  At the end ``lam_i = mu / (-g_i(x))`` are the
KKT multipliers and ``m * mu`` bounds the duality gap.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from . import tolerances as tol
from .body import ConvexBody
from .errors import ConvergenceError, InputError, NoInteriorError, SingularMatrixError
from .numerics import solve_symmetric
from .poly import Polynomial, PolySystem

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverOptions:
    mu0: float = tol.MU0
    mu_shrink: float = tol.MU_SHRINK
    gap_target: float = tol.GAP_TARGET
    newton_tol: float = tol.NEWTON_TOL
    max_newton_iters: int = tol.MAX_NEWTON_ITERS
    armijo_factor: float = tol.ARMIJO_FACTOR
    armijo_slope: float = tol.ARMIJO_SLOPE
    max_backtracks: int = tol.MAX_BACKTRACKS
    warm_start: tuple | None = None


@dataclass
class SolveResult:
    """Maximizer, multipliers and active set returned by :func:`maximize_linear`."""

    x: np.ndarray
    value: float
    lam: np.ndarray
    active: tuple
    gap: float
    kkt_residual: float
    g: np.ndarray
    c: np.ndarray
    newton_iters: int = 0
    converged: bool = True
    trace: list = field(default_factory=list, repr=False)

    def summary(self):
        return {
            "x": self.x.tolist(),
            "value": self.value,
            "lambda": self.lam.tolist(),
            "active": list(self.active),
            "gap": self.gap,
            "kkt_residual": self.kkt_residual,
            "newton_iters": self.newton_iters,
            "converged": self.converged,
        }


def _newton_system(system, x, c, mu):
    g, G, H = system.jets(x)
    if np.any(g >= 0):
        return None
    w = 1.0 / (-g)
    grad = -c + mu * (G.T @ w)
    n = len(x)
    hess = mu * ((G.T * w**2) @ G + (w @ H.reshape(len(w), n * n)).reshape(n, n))
    return g, grad, 0.5 * (hess + hess.T)


def _merit(system, x, c, mu):
    g = system.values(x)
    if np.any(g >= 0):
        return np.inf
    return -float(c @ x) - mu * float(np.sum(np.log(-g)))


def _newton_step(hess, grad):
    # barrier Hessians are SPD away from degeneracy: a Cholesky check gates the plain solve, pivoted LDL^T is the fallback
    try:
        L = np.linalg.cholesky(hess)
        if np.diag(L).min() ** 2 > tol.PIVOT_TOL * np.abs(hess).max():
            return -np.linalg.solve(hess, grad)
    except np.linalg.LinAlgError:
        pass
    try:
        return solve_symmetric(hess, -grad)
    except SingularMatrixError:
        shift = tol.TIKHONOV_SHIFT * max(1.0, np.abs(hess).max())
        try:
            return solve_symmetric(hess + shift * np.eye(len(grad)), -grad)
        except SingularMatrixError as exc:
            raise ConvergenceError(f"barrier Hessian singular after Tikhonov shift: {exc}") from exc


def _center(system, c, x, mu, opts, trace, loose=False):
    """Minimize the barrier merit at fixed ``mu`` starting from strictly feasible ``x``.

    ``loose`` stops once the iterate is well inside Newton's quadratic region,
    which is all an intermediate ``mu`` needs.
    """
    stop = 1e-6 if loose else 1e-14
    iters = 0
    prev = np.inf
    done = False
    for iters in range(1, opts.max_newton_iters + 1):
        sys_ = _newton_system(system, x, c, mu)
        if sys_ is None:
            raise ConvergenceError("iterate left the interior", trace)
        g, grad, hess = sys_
        dx = _newton_step(hess, grad)
        step = float(np.linalg.norm(dx))
        # squared Newton decrement of merit / mu: scale-free distance to the center
        lam2 = float(-grad @ dx) / mu
        if lam2 <= stop or step <= 4 * np.finfo(float).eps * (1.0 + float(np.linalg.norm(x))):
            done = True
            break
        local = lam2 <= 0.25
        if local and lam2 >= 0.5 * prev and lam2 <= 1e-8:
            # Newton has reached its rounding floor; further steps only jitter
            done = True
            break
        prev = lam2
        # stay strictly feasible
        t = 1.0
        for _ in range(opts.max_backtracks):
            if np.all(system.values(x + t * dx) < 0):
                break
            t *= opts.armijo_factor
        else:
            raise ConvergenceError(f"no strictly feasible step at mu={mu:.2e}", trace)
        if local and t == 1.0:
            x = x + dx
            continue
        f0 = _merit(system, x, c, mu)
        slope = float(grad @ dx)
        for _ in range(opts.max_backtracks):
            if _merit(system, x + t * dx, c, mu) <= f0 + opts.armijo_slope * t * slope:
                break
            t *= opts.armijo_factor
        else:
            if local:
                done = True
                break
            trace.append({"mu": mu, "iter": iters, "step": step, "lam2": lam2})
            raise ConvergenceError(f"Newton stagnation at mu={mu:.2e}: no merit decrease in "
                                   f"{opts.max_backtracks} backtracks", trace)
        x = x + t * dx
    return x, iters, done


def _path_follow(system, c, x0, opts):
    x = np.array(x0, dtype=float)
    mu = opts.mu0
    total = 0
    trace = []
    converged = True
    while True:
        last = system.m * mu <= opts.gap_target
        x, it, done = _center(system, c, x, mu, opts, trace, loose=not last)
        total += it
        converged &= done
        trace.append({"mu": mu, "newton_iters": it, "objective": float(c @ x), "centered": done})
        if last:
            break
        mu *= opts.mu_shrink
    return x, mu, total, trace, converged


def find_interior_point(body, margin=None):
    """A point with every constraint at most ``-margin``.

    Returns the body's Slater point after verification when one is given;
    otherwise minimizes ``s`` over ``{(x, s) : g_i(x) <= s}`` with the barrier.
    """
    margin = body.slater_margin if margin is None else margin
    if body.slater is not None:
        worst = float(body.values(body.slater).max())
        if worst <= -margin:
            return body.slater.copy()
        raise NoInteriorError(f"slater point violates margin (max g = {worst:.3e})")
    n = body.n
    lifted = []
    for g in body.constraints:
        e = np.zeros(n + 1, np.int64)
        e[n] = 1
        lifted.append(g.lift() + Polynomial(n + 1, [e], [-1.0]))
    system = PolySystem(lifted)
    x0 = np.zeros(n)
    s0 = float(body.values(x0).max()) + 1.0
    c = np.zeros(n + 1)
    c[n] = -1.0
    z, _, _, _, _ = _path_follow(system, c, np.append(x0, s0), SolverOptions(gap_target=1e-8))
    x = z[:n]
    worst = float(body.values(x).max())
    if worst > -margin:
        raise NoInteriorError(f"no verified interior: phase-I optimum {worst:.3e} > {-margin:.1e} "
                              "(the body may have empty interior)")
    return x


def maximize_linear(body: ConvexBody, c, opts: SolverOptions | None = None) -> SolveResult:
    """Maximize ``<c, x>`` over ``body``; deterministic given ``opts``."""
    opts = opts or SolverOptions()
    c = np.asarray(c, dtype=float)
    if c.shape != (body.n,):
        raise InputError(f"objective has shape {c.shape}, body dimension is {body.n}")
    cnorm = float(np.linalg.norm(c))
    if not cnorm > 0:
        raise InputError("objective must be nonzero")
    x0 = None
    if opts.warm_start is not None:
        cand = np.asarray(opts.warm_start, dtype=float)
        if cand.shape == (body.n,) and np.all(body.values(cand) < -body.slater_margin):
            x0 = cand
    if x0 is None:
        x0 = body.interior_point
    x, mu, iters, trace, converged = _path_follow(body.system, c, x0, opts)
    if not converged:
        log.warning("centering hit max_newton_iters=%d at least once", opts.max_newton_iters)
    g, G, _ = body.jets(x)
    lam = mu / (-g)
    kkt = float(np.linalg.norm(c - G.T @ lam))
    act = np.flatnonzero((lam >= tol.ACT_LAMBDA_REL * cnorm) | (g >= -body.act_g_tol()))
    return SolveResult(
        x=x, value=float(c @ x), lam=lam, active=tuple(int(i) for i in act),
        gap=body.m * mu, kkt_residual=kkt, g=g, c=c, newton_iters=iters, converged=converged, trace=trace,
    )


def support_value(body, c, opts=None):
    """Support function ``sigma_F(c)``: the optimal value of ``max <c, x>`` over the body."""
    return maximize_linear(body, c, opts).value


def with_options(opts, **overrides):
    return replace(opts or SolverOptions(), **overrides)
