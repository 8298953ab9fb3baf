"""Independent reference computations used across tests."""

import itertools

import numpy as np

BOX_VERTICES = np.array(list(itertools.product([-1.0, 1.0], repeat=3)))
SIMPLEX_VERTICES = np.vstack([np.zeros(3), np.eye(3)])


def vertex_max(vertices, c):
    vals = vertices @ c
    k = int(np.argmax(vals))
    return vals[k], vertices[k], np.sort(vals)[-1] - np.sort(vals)[-2]


def bad_square_branch(c):
    """Closed-form maximizer on w >= (|u|+|v|)^2 for c3 < 0 and |c1| != |c2|."""
    e1, e2 = -c[0] / c[2], -c[1] / c[2]
    if abs(e1) > abs(e2):
        return np.array([e1 / 2, 0.0, e1 * e1 / 4])
    return np.array([0.0, e2 / 2, e2 * e2 / 4])


def bad_square_grid_max(c, half=0.3, step=1e-3):
    """Brute force over the lower boundary w = (|u|+|v|)^2 for c3 < 0."""
    g = np.arange(-half, half + step / 2, step)
    U, V = np.meshgrid(g, g, indexing="ij")
    W = (np.abs(U) + np.abs(V)) ** 2
    vals = c[0] * U + c[1] * V + c[2] * W
    k = np.unravel_index(np.argmax(vals), vals.shape)
    return np.array([U[k], V[k], W[k]])


def unit(v):
    v = np.asarray(v, float)
    return v / np.linalg.norm(v)


def seeded_directions(n, count, seed):
    rng = np.random.Generator(np.random.Philox(key=seed))
    z = rng.standard_normal((count, n))
    return z / np.linalg.norm(z, axis=1, keepdims=True)
