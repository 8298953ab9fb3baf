"""Small dense kernels: symmetric solves, rank, cone projection, and a tiny LP.

Everything here works on plain numpy arrays.  The LP used for
relative-interior tests is a textbook two-phase tableau simplex with Bland's
rule; at the sizes involved (a handful of generators) exact basis logic is
worth more than speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.optimize

from . import tolerances as tol
from .errors import InputError, SingularMatrixError


def solve_symmetric(A, b, pivot_tol=tol.PIVOT_TOL):
    """Solve ``A x = b`` for symmetric (possibly indefinite) ``A``.

    Uses a Bunch-Kaufman LDL^T factorization.  Raises
    :class:`SingularMatrixError` carrying the index of the first pivot block
    whose magnitude falls below ``pivot_tol * max|A|``.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n or b.shape[0] != n:
        raise InputError(f"incompatible shapes {A.shape} and {b.shape}")
    scale = np.abs(A).max() if A.size else 0.0
    if scale == 0.0:
        raise SingularMatrixError("zero matrix", pivot_index=0)
    if np.abs(A - A.T).max() > 1e-12 * max(1.0, scale):
        raise InputError("matrix is not symmetric")
    lu, d, perm = scipy.linalg.ldl(A, lower=True)
    threshold = pivot_tol * scale
    k = 0
    while k < n:
        if k + 1 < n and d[k + 1, k] != 0.0:
            block = d[k : k + 2, k : k + 2]
            if np.abs(np.linalg.eigvalsh(block)).min() <= threshold:
                raise SingularMatrixError(f"2x2 pivot block at {k} is singular", pivot_index=k)
            k += 2
        else:
            if abs(d[k, k]) <= threshold:
                raise SingularMatrixError(f"pivot {k} = {d[k, k]:.3e} below threshold", pivot_index=k)
            k += 1
    L = lu[perm]
    y = scipy.linalg.solve_triangular(L, b[perm], lower=True, unit_diagonal=True)
    z = scipy.linalg.solve(d, y, assume_a="sym")
    w = scipy.linalg.solve_triangular(L.T, z, lower=False, unit_diagonal=True)
    x = np.empty(n)
    x[perm] = w
    return x


def rank_estimate(A, rank_tol=tol.RANK_TOL):
    """Numerical rank from column-pivoted QR: count ``|R_kk| > rank_tol |R_11|``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return 0
    R = scipy.linalg.qr(A, mode="r", pivoting=True)[0]
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        return 0
    return int(np.count_nonzero(diag > rank_tol * diag[0]))


def null_space_basis(G, n, rank_tol=tol.RANK_TOL):
    """Orthonormal basis (columns) of the orthogonal complement of the row space of ``G``."""
    G = np.asarray(G, dtype=float).reshape(-1, n)
    if G.shape[0] == 0:
        return np.eye(n)
    Q, R, _ = scipy.linalg.qr(G.T, pivoting=True)
    r = rank_estimate(G, rank_tol)
    return Q[:, r:]


@dataclass
class LpResult:
    """Outcome of :func:`ri_membership_lp`."""

    status: str  # "optimal" or "infeasible"
    t_star: float
    lam: np.ndarray
    residual: float
    offspan: float = 0.0


def _simplex_phase(T, basis, cost, allowed, max_iter=500):
    """Minimize ``cost @ z`` on the tableau ``T`` (last column = rhs) with Bland's rule.

    ``T`` and ``basis`` are modified in place.  Returns the status string.
    """
    m = T.shape[0]
    for _ in range(max_iter):
        cb = cost[basis]
        reduced = cost - cb @ T[:, :-1]
        entering = None
        for j in np.flatnonzero(allowed):
            if reduced[j] < -tol.PIVOT_TOL * max(1.0, abs(cost[j])):
                entering = j
                break
        if entering is None:
            return "optimal"
        col = T[:, entering]
        best = None
        for i in range(m):
            if col[i] > tol.PIVOT_TOL:
                ratio = T[i, -1] / col[i]
                # Bland: smallest ratio, ties by smallest basic index
                if best is None or ratio < best[0] - 1e-15 or (abs(ratio - best[0]) <= 1e-15 and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        _pivot(T, best[1], entering)
        basis[best[1]] = entering
    return "iteration_limit"


def _pivot(T, row, col):
    T[row] /= T[row, col]
    for i in range(T.shape[0]):
        if i != row and T[i, col] != 0.0:
            T[i] -= T[i, col] * T[row]


def ri_membership_lp(V, c, feas_tol=None):
    """Decide how deep ``c`` sits in the cone generated by the columns of ``V``.

    Solves ``max t  s.t.  V lam = c,  lam_i >= t,  t <= ||c|| / min_i ||v_i||``.
    ``t`` is free, so the LP is feasible exactly when ``c`` lies in the span of
    the generators; ``t_star > 0`` means ``c`` has a strictly positive
    representation (relative interior), ``t_star ~ 0`` the relative boundary,
    ``t_star < 0`` outside the cone but inside its span.

    Parameters
    ----------
    V : array_like, shape (n, k)
        Generator columns, each nonzero.
    c : array_like, shape (n,)
    feas_tol : float, optional
        Largest distance from ``c`` to ``span(V)`` still treated as in-span.
        Defaults to ``LP_TOL * (1 + ||c||)``.
    """
    V = np.asarray(V, dtype=float)
    c = np.asarray(c, dtype=float)
    if V.ndim == 1:
        V = V[:, None]
    n, k = V.shape
    if k < 1 or c.shape != (n,):
        raise InputError(f"need n x k generators with k >= 1 and c of length n, got {V.shape}, {c.shape}")
    norms = np.linalg.norm(V, axis=0)
    if norms.min() < tol.MIN_GENERATOR_NORM:
        raise InputError("zero generator column")
    cnorm = float(np.linalg.norm(c))
    if feas_tol is None:
        feas_tol = tol.LP_TOL * (1.0 + cnorm)

    # move c onto span(V) first so phase I ends exactly at zero
    coef, *_ = np.linalg.lstsq(V, c, rcond=None)
    c_span = V @ coef
    offspan = float(np.linalg.norm(c - c_span))
    if offspan > feas_tol:
        return LpResult("infeasible", float("nan"), np.full(k, np.nan), offspan, offspan)

    cap = cnorm / norms.min()
    # equality rows in an orthonormal basis of span(V): full row rank, so phase I never
    # has to pivot on rounding noise of a redundant row
    Q = scipy.linalg.qr(V, mode="economic", pivoting=True)[0][:, : rank_estimate(V)]
    V_full = V
    V = Q.T @ V
    c_span = Q.T @ c_span
    n = V.shape[0]
    # variables: s (k), tp, tm, r, artificials a (n)
    nv = k + 3 + n
    T = np.zeros((n + 1, nv + 1))
    ones = V.sum(axis=1)
    T[:n, :k] = V
    T[:n, k] = ones
    T[:n, k + 1] = -ones
    T[:n, -1] = c_span
    T[n, k] = 1.0
    T[n, k + 1] = -1.0
    T[n, k + 2] = 1.0
    T[n, -1] = cap
    neg = T[:n, -1] < 0
    T[:n][neg] *= -1.0
    T[:n, k + 3 :][np.arange(n), np.arange(n)] = 1.0
    basis = np.array(list(range(k + 3, k + 3 + n)) + [k + 2])

    phase1 = np.zeros(nv)
    phase1[k + 3 :] = 1.0
    allowed = np.ones(nv, bool)
    _simplex_phase(T, basis, phase1, allowed)
    infeas = float(T[basis >= k + 3, -1].sum()) if np.any(basis >= k + 3) else 0.0
    if infeas > feas_tol:
        return LpResult("infeasible", float("nan"), np.full(k, np.nan), infeas, offspan)

    # drive zero-level artificials out of the basis, drop redundant rows
    keep = np.ones(T.shape[0], bool)
    for i in range(T.shape[0]):
        if basis[i] >= k + 3:
            cand = np.flatnonzero(np.abs(T[i, : k + 3]) > 1e-9)
            if cand.size:
                _pivot(T, i, cand[0])
                basis[i] = cand[0]
            else:
                keep[i] = False
    T = T[keep]
    basis = basis[keep]
    allowed = np.zeros(nv, bool)
    allowed[: k + 3] = True
    phase2 = np.zeros(nv)
    phase2[k] = -1.0
    phase2[k + 1] = 1.0
    status = _simplex_phase(T, basis, phase2, allowed)
    if status != "optimal":
        raise ArithmeticError(f"relative-interior LP ended with status {status}")

    z = np.zeros(nv)
    z[basis] = T[:, -1]
    t = z[k] - z[k + 1]
    lam = z[:k] + t
    residual = float(np.abs(V_full @ lam - c).max())
    return LpResult("optimal", float(t), lam, residual, offspan)


def cone_project(V, p):
    """Euclidean projection of ``p`` onto ``cone(columns of V)`` via Lawson-Hanson NNLS."""
    V = np.asarray(V, dtype=float)
    p = np.asarray(p, dtype=float)
    if V.ndim == 1:
        V = V[:, None]
    lam, _ = scipy.optimize.nnls(V, p)
    if not _nnls_kkt_ok(V, p, lam):
        # some scipy releases return non-optimal nnls points; bounded-variable LS is the fallback
        lam = scipy.optimize.lsq_linear(V, p, bounds=(0.0, np.inf), method="bvls", tol=1e-14).x
        lam = np.maximum(lam, 0.0)
    return V @ lam


def _nnls_kkt_ok(V, p, lam):
    w = V.T @ (p - V @ lam)
    scale = tol.NNLS_KKT_TOL * (1.0 + np.linalg.norm(p)) * max(1.0, np.abs(V).max())
    return bool(np.all(lam >= 0) and np.all(w <= scale) and np.all(np.abs(w[lam > 0]) <= scale))
