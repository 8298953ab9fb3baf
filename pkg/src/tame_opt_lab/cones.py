"""Normal cones at boundary points, represented by active-constraint gradients.

Under a Slater point the normal cone of ``{g_i <= 0}`` at ``x`` is the cone
generated by ``grad g_i(x)`` over the active ``i``.  Generators are kept as
given (no pruning of redundant ones).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances as tol
from .errors import DegenerateGradientError, InputError
from .numerics import cone_project, rank_estimate, ri_membership_lp


@dataclass(frozen=True)
class ConeRep:
    """Finitely generated cone; ``generators`` has one generator per row."""

    generators: np.ndarray
    base_point: np.ndarray
    indices: tuple = ()

    def __post_init__(self):
        G = np.atleast_2d(np.asarray(self.generators, dtype=float))
        if G.size and np.linalg.norm(G, axis=1).min() < tol.MIN_GENERATOR_NORM:
            raise DegenerateGradientError("cone generator with (numerically) zero norm")
        object.__setattr__(self, "generators", G)

    @property
    def span_rank(self):
        return rank_estimate(self.generators) if self.generators.size else 0

    @property
    def n(self):
        return self.generators.shape[1]

    def unit_generators(self):
        G = self.generators
        return G / np.linalg.norm(G, axis=1, keepdims=True)


def normal_cone(body, x, active):
    """Cone of active gradients of ``body`` at ``x``."""
    x = np.asarray(x, dtype=float)
    active = tuple(int(i) for i in active)
    if any(i < 0 or i >= body.m for i in active):
        raise InputError(f"active indices {active} out of range for {body.m} constraints")
    if not active:
        return ConeRep(np.zeros((0, body.n)), x, ())
    _, G, _ = body.jets(x)
    GA = G[list(active)]
    norms = np.linalg.norm(GA, axis=1)
    bad = np.flatnonzero(norms < tol.MIN_GENERATOR_NORM)
    if bad.size:
        raise DegenerateGradientError(
            f"active constraint {active[bad[0]]} has zero gradient at {x.tolist()}; "
            "the gradient cone does not represent the normal cone there"
        )
    return ConeRep(GA, x, active)


def strict_complementarity(cone, c, feas_tol=None):
    """Classify ``c`` against ``ri cone``: returns ``(verdict, t_star)``.

    ``verdict`` is ``"interior"`` when ``t_star > RI_TOL * ||c||``,
    ``"boundary"`` when ``|t_star|`` is within that threshold, ``"outside"``
    otherwise (including ``c`` off the span).  ``feas_tol`` is the largest
    distance from the span accepted as rounding; it defaults to the KKT
    tolerance of the solver.
    """
    c = np.asarray(c, dtype=float)
    cnorm = float(np.linalg.norm(c))
    if not cnorm > 0:
        raise InputError("c must be nonzero")
    if cone.generators.shape[0] == 0:
        return "outside", float("nan")
    if feas_tol is None:
        feas_tol = tol.KKT_REL_TOL * (1.0 + cnorm)
    res = ri_membership_lp(cone.generators.T, c, feas_tol=feas_tol)
    if res.status != "optimal":
        return "outside", float("nan")
    thr = tol.RI_TOL * cnorm
    if res.t_star > thr:
        return "interior", res.t_star
    if res.t_star >= -thr:
        return "boundary", res.t_star
    return "outside", res.t_star


def _probe_directions(cone, samples, seed):
    U = cone.unit_generators()
    k = U.shape[0]
    probes = [U]
    mids = []
    for i in range(k):
        for j in range(i + 1, k):
            s = U[i] + U[j]
            nrm = np.linalg.norm(s)
            if nrm > 1e-12:
                mids.append(s / nrm)
    if mids:
        probes.append(np.array(mids))
    extra = samples - sum(len(p) for p in probes)
    if extra > 0:
        rng = np.random.Generator(np.random.Philox(key=seed))
        w = rng.exponential(size=(extra, k))
        comb = w @ U
        nrm = np.linalg.norm(comb, axis=1, keepdims=True)
        comb = comb[nrm[:, 0] > 1e-12] / nrm[nrm[:, 0] > 1e-12]
        probes.append(comb)
    return np.vstack(probes)


def directed_distance(a, b, samples=16, seed=0, return_witness=False):
    """Largest gap from unit vectors of cone ``a`` to the unit-sphere trace of cone ``b``.

    Probes are the normalized generators of ``a``, their pairwise normalized
    midpoints, and seeded random positive combinations up to ``samples``.  For
    each probe ``p`` the gap is ``||p - q/||q|| ||`` with ``q`` the projection of
    ``p`` onto ``b`` (``||p|| = 1`` when the projection vanishes).
    """
    P = _probe_directions(a, samples, seed)
    V = b.generators.T
    best, witness = 0.0, None
    for p in P:
        q = cone_project(V, p) if V.size else np.zeros_like(p)
        qn = np.linalg.norm(q)
        d = 1.0 if qn <= 1e-14 else float(np.linalg.norm(p - q / qn))
        if witness is None or d > best:
            best, witness = d, p
    return (best, witness) if return_witness else best


def cone_sphere_distance(a, b, samples=16, seed=0):
    """Directed distance from cone ``a`` to cone ``b``; see :func:`directed_distance`."""
    return directed_distance(a, b, samples, seed)


def symmetric_cone_distance(a, b, samples=16, seed=0):
    """``max`` of the two directed distances."""
    return max(directed_distance(a, b, samples, seed), directed_distance(b, a, samples, seed))
