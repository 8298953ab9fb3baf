"""Compact convex bodies presented by polynomial inequalities, and the fixture library.

A body is ``{x : g_i(x) <= 0 for all i} ∩ B(0, R)``.  The ball constraint
``||x||^2 - R^2 <= 0`` is always appended as the last constraint, so a body
with ``m`` user constraints has ``m + 1`` constraints in total, indexed
``0 .. m`` (the ball is index ``m``).
"""

from __future__ import annotations

import json
from functools import cached_property

import numpy as np

from . import tolerances as tol
from .errors import ConvexityError, InputError, NoInteriorError
from .poly import Polynomial, PolySystem


class ConvexBody:
    """Feasible region ``F``; immutable after construction.

    Parameters
    ----------
    n : int
        Ambient dimension.
    constraints : list of Polynomial
        User constraints ``g_i``; feasibility is ``g_i(x) <= 0``.
    radius : float
        Radius ``R`` of the bounding ball.
    slater : array_like, optional
        A point claimed to satisfy every constraint with margin.
    name : str, optional
        Label used in reports.
    validate : bool
        Run the convexity probe and Slater verification.
    """

    def __init__(self, n, constraints, radius, slater=None, name=None, validate=True,
                 slater_margin=tol.SLATER_MARGIN):
        n = int(n)
        if n < 1:
            raise InputError("dimension must be at least 1")
        radius = float(radius)
        if not radius > 0:
            raise InputError("radius must be positive")
        constraints = list(constraints)
        for i, g in enumerate(constraints):
            if g.nvars != n:
                raise InputError(f"constraint {i} has {g.nvars} variables, body has {n}")
        self.n = n
        self.radius = radius
        self.user_constraints = tuple(constraints)
        self.constraints = tuple(constraints) + (Polynomial.sphere(n, radius),)
        self.slater = None if slater is None else np.asarray(slater, dtype=float)
        if self.slater is not None and self.slater.shape != (n,):
            raise InputError(f"slater point must have length {n}")
        self.slater_margin = float(slater_margin)
        self.name = name
        self.system = PolySystem(self.constraints)
        if validate:
            convexity_probe(self)
            if self.slater is not None:
                worst = float(self.values(self.slater).max())
                if worst > -self.slater_margin:
                    raise NoInteriorError(
                        f"slater point {self.slater.tolist()} is not strictly feasible (max g = {worst:.3e})"
                    )

    @property
    def m(self):
        """Total number of constraints, ball included."""
        return len(self.constraints)

    @property
    def ball_index(self):
        return self.m - 1

    def values(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise InputError(f"point has dimension {x.shape[-1]}, body has {self.n}")
        return self.system.values(x)

    def jets(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise InputError(f"point has dimension {x.shape}, body has {self.n}")
        return self.system.jets(x)

    def contains(self, x, tol_=0.0):
        """True iff every constraint value is at most ``tol_``."""
        if tol_ < 0:
            raise InputError("tolerance must be nonnegative")
        return bool(np.all(self.values(x) <= tol_))

    def act_g_tol(self):
        return tol.ACT_G_REL * (1.0 + self.radius**2)

    def scaled(self, s):
        """Same set, every user constraint multiplied by ``s > 0``."""
        if not s > 0:
            raise InputError("scale must be positive")
        return ConvexBody(self.n, [g.scale(s) for g in self.user_constraints], self.radius,
                          slater=self.slater, name=self.name, validate=False,
                          slater_margin=self.slater_margin)

    @cached_property
    def interior_point(self):
        from .solver import find_interior_point

        return find_interior_point(self)

    # -- serialization ---------------------------------------------------------

    def to_json(self):
        doc = {"n": self.n, "radius": self.radius,
               "constraints": [g.to_json() for g in self.user_constraints]}
        if self.slater is not None:
            doc["slater"] = self.slater.tolist()
        if self.name:
            doc["name"] = self.name
        return doc

    def __repr__(self):
        label = self.name or "body"
        return f"ConvexBody({label}, n={self.n}, m={self.m}, R={self.radius:g})"

    def __reduce__(self):
        return (_rebuild, (self.to_json(),))


def _rebuild(doc):
    return load(doc, validate=False)


def convexity_probe(body, samples=tol.CONVEXITY_SAMPLES, seed=0, threshold=tol.CONVEXITY_TOL):
    """Check Hessian positive semidefiniteness of every constraint at seeded points of B(0, R).

    Passing is evidence, not proof.  Raises :class:`ConvexityError` naming the
    constraint, the witness point and the offending eigenvalue.
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    n = body.n
    z = rng.standard_normal((samples, n))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    pts = z * body.radius * rng.random((samples, 1)) ** (1.0 / n)
    pts[0] = 0.0
    for i, g in enumerate(body.user_constraints):
        if g.degree <= 1:
            continue
        for x in pts:
            eig = float(np.linalg.eigvalsh(g.hessian(x)).min())
            if eig < -threshold:
                raise ConvexityError(
                    f"constraint {i} is not convex: Hessian eigenvalue {eig:.6g} at {x.tolist()}",
                    constraint=i, point=x, eigenvalue=eig,
                )
    return True


def load(document, validate=True):
    """Build a body from a JSON string or an already-parsed mapping.

    Format: ``{"n": 3, "radius": 2.0, "slater": [...], "constraints": [{"terms": [...]}, ...]}``.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise InputError(f"body document does not parse: {exc}") from exc
    try:
        n = int(document["n"])
        radius = float(document["radius"])
        raw = document.get("constraints", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed body document: {exc}") from exc
    constraints = []
    for i, obj in enumerate(raw):
        g = Polynomial.from_json(obj, nvars=n) if obj.get("terms") else Polynomial(n)
        constraints.append(g)
    return ConvexBody(n, constraints, radius, slater=document.get("slater"),
                      name=document.get("name"), validate=validate)


# -- fixture library -------------------------------------------------------------

def _p(*terms):
    return Polynomial.from_terms(3, terms)


def _fixture_documents():
    u2 = ((2, 0, 0), 1.0)
    docs = {}
    docs["ball"] = dict(constraints=[], radius=1.0, slater=[0.0, 0.0, 0.0])
    box = []
    for j in range(3):
        e = [0, 0, 0]
        e[j] = 1
        box.append(_p((tuple(e), 1.0), ((0, 0, 0), -1.0)))
        box.append(_p((tuple(e), -1.0), ((0, 0, 0), -1.0)))
    docs["box"] = dict(constraints=box, radius=2.0, slater=[0.0, 0.0, 0.0])
    simplex = [_p(((1, 0, 0), -1.0)), _p(((0, 1, 0), -1.0)), _p(((0, 0, 1), -1.0)),
               _p(((1, 0, 0), 1.0), ((0, 1, 0), 1.0), ((0, 0, 1), 1.0), ((0, 0, 0), -1.0))]
    docs["simplex"] = dict(constraints=simplex, radius=2.0, slater=[0.25, 0.25, 0.25])
    # w >= u^2 + |v|
    docs["ridge"] = dict(constraints=[_p(u2, ((0, 1, 0), 1.0), ((0, 0, 1), -1.0)),
                                      _p(u2, ((0, 1, 0), -1.0), ((0, 0, 1), -1.0))],
                         radius=2.0, slater=[0.0, 0.0, 1.0])
    # v >= 0, w >= 0, v + w >= u^2
    docs["nc_fail"] = dict(constraints=[_p(((0, 1, 0), -1.0)), _p(((0, 0, 1), -1.0)),
                                        _p(u2, ((0, 1, 0), -1.0), ((0, 0, 1), -1.0))],
                           radius=2.0, slater=[0.0, 0.5, 0.5])
    # w >= (|u| + |v|)^2  as  (u+v)^2 - w <= 0  and  (u-v)^2 - w <= 0
    docs["bad_square"] = dict(constraints=[_p(u2, ((1, 1, 0), 2.0), ((0, 2, 0), 1.0), ((0, 0, 1), -1.0)),
                                           _p(u2, ((1, 1, 0), -2.0), ((0, 2, 0), 1.0), ((0, 0, 1), -1.0))],
                              radius=2.0, slater=[0.0, 0.0, 1.0])
    return docs


FIXTURE_NAMES = ("ball", "box", "simplex", "ridge", "nc_fail", "bad_square")
_FIXTURE_CACHE = {}


def fixture(name):
    """One of the documented bodies in ``FIXTURE_NAMES`` (all with n = 3)."""
    if name not in FIXTURE_NAMES:
        raise InputError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURE_NAMES)}")
    if name not in _FIXTURE_CACHE:
        d = _fixture_documents()[name]
        _FIXTURE_CACHE[name] = ConvexBody(3, d["constraints"], d["radius"], slater=d["slater"], name=name)
    return _FIXTURE_CACHE[name]


def fixture_document(name):
    """JSON document of a fixture, in the body file format."""
    return fixture(name).to_json()
