"""Known exceptional directions of the fixture bodies.

For each fixture the directions ``c`` at which identifiability fails
(nonunique maximizer, strict complementarity lost, LICQ lost) form a finite
union of great-circle arcs, curves and points on the unit sphere.  This
module gives the angular distance from a unit vector to that set.

Families per fixture (all bodies have n = 3, coordinates ``(u, v, w)``):

ball
    empty.
box
    the three great circles ``c_j = 0`` (ties between vertices).
simplex
    boundaries of the vertex normal fans ``<c, a - b> = 0`` with ``a`` the top vertex.
ridge  (``w >= u^2 + |v|``, R = 2)
    * ``normalize(2t, +-1, -1)`` for ``|t| <= t*``, ``t*^2 + t*^4 = 4``
      (edges of the ridge normal cones; the optimum is a segment there);
    * ``x / 2`` for ``x`` on the rim ``w = u^2 + |v|, ||x|| = 2``;
    * arcs between pairs of ``{grad g_1, grad g_2, x*}`` at the corners ``x* = (+-t*, 0, t*^2)``.
bad_square  (``w >= (|u| + |v|)^2``, R = 2)
    * ``normalize(2s, +-2s, -1)`` for ``|s| <= s*``, ``s*^2 / 2 + s*^4 = 4``
      (a segment of maximizers joins the two ridges ``u = 0`` and ``v = 0``);
    * ``x / 2`` on the rim ``w = (|u| + |v|)^2, ||x|| = 2``;
    * arcs between the three constraint normals at the four corners
      ``(+-t*, 0, t*^2)``, ``(0, +-t*, t*^2)``;
    * the point ``(0, 0, -1)`` (both gradients parallel at the origin).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import InputError

_DENSITY = 4000


def _unit(a):
    a = np.atleast_2d(np.asarray(a, dtype=float))
    return a / np.linalg.norm(a, axis=1, keepdims=True)


def _arc(a, b, k=400):
    t = np.linspace(0.0, 1.0, k)[:, None]
    return _unit((1 - t) * np.asarray(a, float) + t * np.asarray(b, float))


def _quartic_root(a):
    """Positive root of ``a s^2 + s^4 = 4``."""
    return float(np.sqrt((-a + np.sqrt(a * a + 16.0)) / 2.0))


def _corner_arcs(points, grads):
    out = []
    for x, gs in zip(points, grads):
        gens = [*gs, np.asarray(x, float)]
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                out.append(_arc(gens[i], gens[j]))
    return out


@lru_cache(maxsize=None)
def _ridge_cloud():
    ts = _quartic_root(1.0)
    t = np.linspace(-ts, ts, _DENSITY)
    parts = [_unit(np.column_stack([2 * t, s * np.ones_like(t), -np.ones_like(t)])) for s in (1.0, -1.0)]
    rim = []
    for phi in np.linspace(0.0, 2 * np.pi, _DENSITY, endpoint=False):
        cu, sv = np.cos(phi), np.sin(phi)

        def f(rho):
            w = rho**2 * cu**2 + rho * abs(sv)
            return rho**2 + w**2 - 4.0

        rho = brentq(f, 0.0, 2.0)
        rim.append((rho * cu, rho * sv, rho**2 * cu**2 + rho * abs(sv)))
    parts.append(_unit(np.array(rim)))
    pts, grads = [], []
    for s in (1.0, -1.0):
        x = np.array([s * ts, 0.0, ts**2])
        pts.append(x)
        grads.append([np.array([2 * x[0], 1.0, -1.0]), np.array([2 * x[0], -1.0, -1.0])])
    parts += _corner_arcs(pts, grads)
    return np.vstack(parts)


@lru_cache(maxsize=None)
def _bad_square_cloud():
    ss = _quartic_root(0.5)
    s = np.linspace(-ss, ss, _DENSITY)
    parts = [_unit(np.column_stack([2 * s, sg * 2 * s, -np.ones_like(s)])) for sg in (1.0, -1.0)]
    phi = np.linspace(0.0, 2 * np.pi, _DENSITY, endpoint=False)
    k = (np.abs(np.cos(phi)) + np.abs(np.sin(phi))) ** 2
    rho2 = (-1.0 + np.sqrt(1.0 + 16.0 * k**2)) / (2.0 * k**2)
    rho = np.sqrt(rho2)
    parts.append(_unit(np.column_stack([rho * np.cos(phi), rho * np.sin(phi), rho2 * k])))
    ts = _quartic_root(1.0)
    pts, grads = [], []
    for x in ([ts, 0, ts**2], [-ts, 0, ts**2], [0, ts, ts**2], [0, -ts, ts**2]):
        x = np.array(x, float)
        u, v = x[0], x[1]
        pts.append(x)
        grads.append([np.array([2 * (u + v), 2 * (u + v), -1.0]),
                      np.array([2 * (u - v), -2 * (u - v), -1.0])])
    parts += _corner_arcs(pts, grads)
    parts.append(np.array([[0.0, 0.0, -1.0]]))
    return np.vstack(parts)


def _cloud_distance(cloud, c):
    return float(np.arccos(np.clip((cloud @ c).max(), -1.0, 1.0)))


def _box_distance(c):
    return float(np.arcsin(np.clip(np.abs(c).min(), 0.0, 1.0)))


_SIMPLEX_VERTICES = np.vstack([np.zeros(3), np.eye(3)])


def _simplex_distance(c):
    vals = _SIMPLEX_VERTICES @ c
    a = int(np.argmax(vals))
    best = np.inf
    for b in range(4):
        if b == a:
            continue
        nu = _SIMPLEX_VERTICES[a] - _SIMPLEX_VERTICES[b]
        best = min(best, float(np.arcsin(np.clip(abs(nu @ c) / np.linalg.norm(nu), 0.0, 1.0))))
    return best


def exceptional_distance(name, c):
    """Angular distance from ``c`` (normalized here) to the exceptional set of fixture ``name``."""
    c = np.asarray(c, dtype=float)
    if c.shape != (3,) or not np.linalg.norm(c) > 0:
        raise InputError("c must be a nonzero 3-vector")
    c = c / np.linalg.norm(c)
    if name == "ball":
        return float("inf")
    if name == "box":
        return _box_distance(c)
    if name == "simplex":
        return _simplex_distance(c)
    if name == "ridge":
        return _cloud_distance(_ridge_cloud(), c)
    if name == "bad_square":
        return _cloud_distance(_bad_square_cloud(), c)
    raise InputError(f"no documented exceptional set for {name!r}")
