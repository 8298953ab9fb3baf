import numpy as np
import pytest

from tame_opt_lab.body import FIXTURE_NAMES, fixture, load
from tame_opt_lab.cones import normal_cone, strict_complementarity
from tame_opt_lab.errors import InputError, NoInteriorError
from tame_opt_lab.solver import SolverOptions, find_interior_point, maximize_linear, support_value

from oracles import BOX_VERTICES, SIMPLEX_VERTICES, bad_square_branch, bad_square_grid_max, seeded_directions, unit, vertex_max


def test_ball_south_pole():
    r = maximize_linear(fixture("ball"), [0, 0, -1])
    np.testing.assert_allclose(r.x, [0, 0, -1], atol=1e-8)
    assert r.value == pytest.approx(1.0, abs=1e-8)
    assert r.active == (0,)
    assert r.lam[0] == pytest.approx(0.5, rel=1e-6)


def test_ridge_origin_and_multipliers():
    r = maximize_linear(fixture("ridge"), [0, 0, -1])
    assert np.linalg.norm(r.x) <= 1e-6
    assert r.active == (0, 1)
    np.testing.assert_allclose(r.lam[:2], [0.5, 0.5], atol=1e-6)
    assert r.gap <= 1e-9


def test_bad_square_branch_matches_closed_form_and_grid():
    c = unit([0.2, 0.1, -1])
    r = maximize_linear(fixture("bad_square"), c)
    np.testing.assert_allclose(r.x, [0.1, 0, 0.01], atol=1e-6)
    np.testing.assert_allclose(r.x, bad_square_branch(c), atol=1e-6)
    np.testing.assert_allclose(r.x, bad_square_grid_max(c), atol=1e-3)


def test_interior_points():
    assert np.all(find_interior_point(fixture("ball")) == 0)
    ridge = fixture("ridge")
    bare = load({"n": 3, "radius": 2.0, "constraints": [g.to_json() for g in ridge.user_constraints]})
    x = find_interior_point(bare)
    assert bare.values(x).max() <= -1e-6
    flat = load({"n": 1, "radius": 1.0, "constraints": [{"terms": [{"exps": [1], "coef": 1.0}]},
                                                        {"terms": [{"exps": [1], "coef": -1.0}]}]})
    with pytest.raises(NoInteriorError):
        find_interior_point(flat)


def test_support_values():
    big = load({"n": 3, "radius": 2.0, "constraints": []})
    for c in seeded_directions(3, 5, 3):
        assert support_value(big, c) == pytest.approx(2.0, abs=1e-8)
    assert support_value(fixture("ridge"), [0, 0, -1]) == pytest.approx(0.0, abs=1e-8)
    for name in FIXTURE_NAMES:
        c = seeded_directions(3, 1, 11)[0]
        assert support_value(fixture(name), 2 * c) == pytest.approx(2 * support_value(fixture(name), c), abs=1e-7)


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_feasibility_kkt_and_complementarity(name):
    body = fixture(name)
    for c in seeded_directions(3, 100, 100):
        r = maximize_linear(body, c)
        assert body.contains(r.x, 1e-7)
        assert r.kkt_residual <= 1e-6 * (1 + np.linalg.norm(c))
        assert np.all(r.lam >= 0)
        g = body.values(r.x)
        expected = np.flatnonzero((r.lam >= 1e-6 * np.linalg.norm(c)) | (g >= -body.act_g_tol()))
        assert r.active == tuple(expected)
        verdict, _ = strict_complementarity(normal_cone(body, r.x, r.active), c)
        assert verdict in ("interior", "boundary")


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_dominance_over_feasible_samples(name, rng):
    body = fixture(name)
    X = rng.uniform(-body.radius, body.radius, size=(200000, 3))
    Y = X[np.all(body.values(X) <= 0, axis=1)][:1000]
    assert len(Y) >= 500
    for c in seeded_directions(3, 3, 21):
        assert np.all(support_value(body, c) >= Y @ c - 1e-7)


@pytest.mark.parametrize("name", ["ball", "ridge", "simplex", "bad_square"])
def test_argmax_scale_invariant(name):
    body = fixture(name)
    c = seeded_directions(3, 1, 5)[0]
    x = maximize_linear(body, c).x
    for s in (0.5, 3.0):
        np.testing.assert_allclose(maximize_linear(body, s * c).x, x, atol=1e-7)


@pytest.mark.parametrize("name, verts", [("box", BOX_VERTICES), ("simplex", SIMPLEX_VERTICES)])
def test_vertex_enumeration(name, verts):
    body = fixture(name)
    for c in seeded_directions(3, 30, 7):
        val, v, margin = vertex_max(verts, c)
        if margin < 1e-3:
            continue
        r = maximize_linear(body, c)
        assert r.value == pytest.approx(val, abs=1e-6)
        np.testing.assert_allclose(r.x, v, atol=1e-6)


def test_bad_inputs():
    with pytest.raises(InputError):
        maximize_linear(fixture("ball"), [0, 0, 0])
    with pytest.raises(InputError):
        maximize_linear(fixture("ball"), [1, 0])


def test_iteration_cap_reports_not_converged():
    r = maximize_linear(fixture("ridge"), [0, 0, -1], SolverOptions(max_newton_iters=1))
    assert not r.converged


def test_warm_start_same_answer():
    body = fixture("ridge")
    c = unit([0.3, 0.1, -1])
    a = maximize_linear(body, c)
    b = maximize_linear(body, c, SolverOptions(warm_start=(0.0, 0.0, 0.5)))
    np.testing.assert_allclose(a.x, b.x, atol=1e-7)


def test_deterministic():
    c = unit([0.3, -0.4, 0.2])
    a = maximize_linear(fixture("bad_square"), c)
    b = maximize_linear(fixture("bad_square"), c)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.lam, b.lam)
