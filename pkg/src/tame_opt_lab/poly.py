"""Sparse multivariate polynomials with exact first and second derivatives.

A polynomial is stored as a dense exponent matrix (one row per monomial) and a
coefficient vector.  Derivatives are formed symbolically once, at
construction, and packed into a single "jet table" so that value, gradient and
Hessian come out of one vectorized monomial evaluation.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError


def _merge(exps, coefs):
    """Combine duplicate exponent rows and drop exact zeros."""
    exps = np.asarray(exps, dtype=np.int64)
    coefs = np.asarray(coefs, dtype=float)
    if exps.shape[0] == 0:
        return exps.reshape(0, exps.shape[1] if exps.ndim == 2 else 0), coefs[:0]
    uniq, inverse = np.unique(exps, axis=0, return_inverse=True)
    summed = np.zeros(len(uniq))
    np.add.at(summed, inverse.ravel(), coefs)
    keep = summed != 0.0
    return uniq[keep], summed[keep]


def _derivative(exps, coefs, j):
    """Symbolic partial derivative with respect to variable ``j``."""
    e = exps[:, j]
    mask = e > 0
    d_exps = exps[mask].copy()
    d_exps[:, j] -= 1
    return d_exps, coefs[mask] * e[mask]


class Polynomial:
    """Immutable sparse polynomial in ``nvars`` real variables.

    Parameters
    ----------
    nvars : int
        Ambient dimension.
    exps : array_like of int, shape (T, nvars)
        Exponent vectors; rows need not be unique.
    coefs : array_like of float, shape (T,)
        Coefficients matching ``exps``.
    """

    __slots__ = ("nvars", "exps", "coefs", "_table", "_table_coef")

    def __init__(self, nvars, exps=(), coefs=()):
        nvars = int(nvars)
        if nvars < 1:
            raise InputError("nvars must be positive")
        exps = np.asarray(exps, dtype=np.int64).reshape(-1, nvars) if len(exps) else np.zeros((0, nvars), np.int64)
        coefs = np.asarray(coefs, dtype=float).ravel()
        if exps.shape[0] != coefs.shape[0]:
            raise InputError("exponent rows and coefficients differ in length")
        if np.any(exps < 0):
            raise InputError("exponents must be nonnegative")
        if not np.all(np.isfinite(coefs)):
            raise InputError("coefficients must be finite")
        exps, coefs = _merge(exps, coefs)
        exps.setflags(write=False)
        coefs.setflags(write=False)
        self.nvars = nvars
        self.exps = exps
        self.coefs = coefs
        self._table, self._table_coef = self._build_jet_table()

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_terms(cls, nvars, terms):
        """Build from an iterable of ``(exponents, coefficient)`` pairs."""
        terms = list(terms)
        if not terms:
            return cls(nvars)
        exps, coefs = zip(*terms)
        for e in exps:
            if len(e) != nvars:
                raise InputError(f"exponent vector {list(e)} does not have length {nvars}")
        return cls(nvars, exps, coefs)

    @classmethod
    def from_json(cls, obj, nvars=None):
        """Parse ``{"terms": [{"exps": [...], "coef": c}, ...]}``."""
        try:
            terms = [(tuple(int(v) for v in t["exps"]), float(t["coef"])) for t in obj["terms"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed polynomial: {exc}") from exc
        if nvars is None:
            if not terms:
                raise InputError("cannot infer nvars of an empty polynomial")
            nvars = len(terms[0][0])
        return cls.from_terms(nvars, terms)

    def to_json(self):
        return {"terms": [{"exps": [int(v) for v in e], "coef": float(c)} for e, c in zip(self.exps, self.coefs)]}

    @classmethod
    def linear(cls, a, b=0.0):
        """The affine polynomial ``<a, x> + b``."""
        a = np.asarray(a, dtype=float)
        n = a.size
        exps = list(np.eye(n, dtype=np.int64)) + [np.zeros(n, np.int64)]
        return cls(n, exps, list(a) + [b])

    @classmethod
    def sphere(cls, n, radius):
        """``||x||^2 - radius^2``."""
        exps = list(2 * np.eye(n, dtype=np.int64)) + [np.zeros(n, np.int64)]
        return cls(n, exps, [1.0] * n + [-float(radius) ** 2])

    # -- algebra ---------------------------------------------------------------

    @property
    def degree(self):
        return int(self.exps.sum(axis=1).max()) if len(self.coefs) else 0

    @property
    def terms(self):
        return [(tuple(int(v) for v in e), float(c)) for e, c in zip(self.exps, self.coefs)]

    def canonical(self):
        """Return the canonical form (already canonical: merge is done on construction)."""
        return Polynomial(self.nvars, self.exps, self.coefs)

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        if other.nvars != self.nvars:
            raise InputError("cannot add polynomials in different numbers of variables")
        return Polynomial(self.nvars, np.vstack([self.exps, other.exps]), np.concatenate([self.coefs, other.coefs]))

    def __neg__(self):
        return Polynomial(self.nvars, self.exps, -self.coefs)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        return Polynomial(self.nvars, self.exps, float(s) * self.coefs)

    def lift(self, extra=1):
        """Same polynomial viewed in ``nvars + extra`` variables (new ones absent)."""
        pad = np.zeros((len(self.coefs), extra), np.int64)
        return Polynomial(self.nvars + extra, np.hstack([self.exps, pad]), self.coefs)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (
            self.nvars == other.nvars
            and self.exps.shape == other.exps.shape
            and np.array_equal(self.exps, other.exps)
            and np.array_equal(self.coefs, other.coefs)
        )

    def __hash__(self):
        return hash((self.nvars, self.exps.tobytes(), self.coefs.tobytes()))

    def __repr__(self):
        names = "xyzw" if self.nvars <= 4 else None

        def mono(e):
            parts = []
            for j, k in enumerate(e):
                if k:
                    v = names[j] if names else f"x{j}"
                    parts.append(v if k == 1 else f"{v}^{k}")
            return "*".join(parts) or "1"

        body = " + ".join(f"{c:g}*{mono(e)}" for e, c in zip(self.exps, self.coefs)) or "0"
        return f"Polynomial({body})"

    # -- evaluation ------------------------------------------------------------

    def _build_jet_table(self):
        n = self.nvars
        blocks_e = [self.exps]
        offset = len(self.coefs)
        # rows of the output: 0 -> value, 1..n -> gradient, 1+n.. -> hessian (row-major)
        out = []
        grads = []
        for j in range(n):
            de, dc = _derivative(self.exps, self.coefs, j)
            grads.append((de, dc))
            blocks_e.append(de)
            out.append((1 + j, offset, dc))
            offset += len(dc)
        for j in range(n):
            de, dc = grads[j]
            for k in range(j, n):
                he, hc = _derivative(de, dc, k)
                blocks_e.append(he)
                out.append((1 + n + j * n + k, offset, hc))
                if k != j:
                    out.append((1 + n + k * n + j, offset, hc))
                offset += len(hc)
        table = np.vstack(blocks_e) if offset else np.zeros((0, n), np.int64)
        coef = np.zeros((1 + n + n * n, offset))
        coef[0, : len(self.coefs)] = self.coefs
        for row, start, c in out:
            coef[row, start : start + len(c)] = c
        return table, coef

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.nvars:
            raise InputError(f"point has dimension {x.shape[-1]}, polynomial has {self.nvars} variables")
        return x

    def evaluate(self, x):
        """Value at ``x``; a batch of points of shape (N, nvars) gives shape (N,)."""
        x = self._check(x)
        mons = np.prod(np.power(x[..., None, :], self.exps), axis=-1)
        return mons @ self.coefs

    __call__ = evaluate

    def jet2(self, x):
        """Value, gradient and Hessian at a single point ``x``."""
        x = self._check(x)
        n = self.nvars
        mons = np.prod(np.power(x[None, :], self._table), axis=-1)
        out = self._table_coef @ mons
        return float(out[0]), out[1 : 1 + n].copy(), out[1 + n :].reshape(n, n).copy()

    def gradient(self, x):
        return self.jet2(x)[1]

    def hessian(self, x):
        return self.jet2(x)[2]


class PolySystem:
    """A fixed list of polynomials evaluated together through one stacked jet table.

    Used by bodies and solvers, where every Newton step needs all constraint
    values, gradients and Hessians at the same point.
    """

    def __init__(self, polys):
        polys = list(polys)
        if not polys:
            raise InputError("empty polynomial system")
        n = polys[0].nvars
        if any(p.nvars != n for p in polys):
            raise InputError("all polynomials in a system must share nvars")
        self.polys = polys
        self.n = n
        self.m = len(polys)
        tables, val_e = [], []
        width = sum(p._table.shape[0] for p in polys)
        big = np.zeros((self.m * (1 + n + n * n), width))
        val_map = np.zeros((self.m, sum(len(p.coefs) for p in polys)))
        off = voff = 0
        for i, p in enumerate(polys):
            k = p._table.shape[0]
            tables.append(p._table)
            big[i * (1 + n + n * n) : (i + 1) * (1 + n + n * n), off : off + k] = p._table_coef
            off += k
            val_e.append(p.exps)
            val_map[i, voff : voff + len(p.coefs)] = p.coefs
            voff += len(p.coefs)
        self._table = np.vstack(tables) if width else np.zeros((0, n), np.int64)
        self._coef = big
        self._val_exps = np.vstack(val_e) if voff else np.zeros((0, n), np.int64)
        self._val_map = val_map
        self._powers = np.arange(int(self._val_exps.max(initial=0)) + 1)
        self._var_idx = np.arange(n)

    def values(self, x):
        """Constraint values at ``x`` (shape (m,)) or at a batch (shape (N, m))."""
        x = np.asarray(x, dtype=float)
        # per-variable power table, then gather: cheaper than powering every monomial in a batch
        P = x[..., :, None] ** self._powers
        mons = np.prod(P[..., self._var_idx, self._val_exps], axis=-1)
        return mons @ self._val_map.T

    def jets(self, x):
        """Values (m,), gradients (m, n), Hessians (m, n, n) at ``x``."""
        n, m = self.n, self.m
        x = np.asarray(x, dtype=float)
        mons = np.prod(np.power(x[None, :], self._table), axis=-1)
        out = (self._coef @ mons).reshape(m, 1 + n + n * n)
        return out[:, 0].copy(), out[:, 1 : 1 + n].copy(), out[:, 1 + n :].reshape(m, n, n).copy()
