import numpy as np
import pytest

from tame_opt_lab.body import FIXTURE_NAMES, fixture
from tame_opt_lab.criticality import decay_along_manifold, kkt_jacobian, quadratic_decay, sensitivity, strong_criticality
from tame_opt_lab.errors import InputError, SamplingError
from tame_opt_lab.identify import extract_manifold, manifold_at
from tame_opt_lab.solver import maximize_linear

from oracles import seeded_directions, unit


def _solve(name, c):
    body = fixture(name)
    r = maximize_linear(body, np.asarray(c, float))
    return body, r, extract_manifold(body, r)


def test_ball_decay_constant():
    body, r, _ = _solve("ball", unit([0.3, -0.2, 0.9]))
    rep = quadratic_decay(body, r, 0.5, 2000, seed=1)
    assert rep.delta_hat >= 0.45
    assert rep.violations == 0


def test_ridge_decay_floor():
    body, r, _ = _solve("ridge", [0, 0, -1])
    assert quadratic_decay(body, r, 0.3, 400, seed=2).delta_hat >= 0.25


def test_box_facet_has_no_decay():
    body, r, _ = _solve("box", [0, 0, -1])
    assert quadratic_decay(body, r, 0.5, 500, seed=3).delta_hat <= 1e-6


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_sampled_points_never_beat_maximizer(name):
    for k, c in enumerate(seeded_directions(3, 5, 40)):
        body, r, _ = _solve(name, c)
        rep = quadratic_decay(body, r, 0.25 * body.radius, 200, seed=k)
        assert rep.max_violation <= 1e-7
        assert body.contains(np.array(rep.min_ratio_witness), 1e-9)


@pytest.mark.parametrize("name, c", [("ball", (0.2, 0.5, -0.8)), ("ridge", (0, 0, -1)), ("ridge", (0.3, 0.2, -1))])
def test_decay_nonincreasing_in_radius(name, c):
    body, r, _ = _solve(name, unit(c))
    # draws are not nested across radii, so allow sampling noise
    small = quadratic_decay(body, r, 0.1, 400, seed=5).delta_hat
    large = quadratic_decay(body, r, 0.2, 400, seed=5).delta_hat
    assert large <= small + 1e-3


def test_ridge_strong_along_manifold():
    body, r, m = _solve("ridge", [0, 0, -1])
    rep = strong_criticality(body, r, m)
    assert rep.strict_comp == "interior" and rep.t_star == pytest.approx(0.5, abs=1e-6)
    assert rep.delta_hat >= 0.99 and rep.strong


def test_ball_strong_with_ray_cone():
    body, r, m = _solve("ball", unit([1, 1, 1]))
    rep = strong_criticality(body, r, m)
    assert rep.strong and rep.t_star == pytest.approx(0.5, abs=1e-6)


def test_ridge_generator_direction_not_strong():
    body = fixture("ridge")
    c = np.array([0, 1.0, -1.0])
    r = maximize_linear(body, c)
    rep = strong_criticality(body, r, extract_manifold(body, r))
    assert not rep.strong
    # the optimal face is a segment: the solver lands mid-face, where decay along M fails
    assert rep.delta_hat <= 1e-4


def test_vertex_strong_without_decay_sampling():
    body, r, m = _solve("box", unit([1, 2, 3]))
    rep = strong_criticality(body, r, m)
    assert rep.delta_hat is None and rep.strong


def test_strong_verdict_scale_invariant():
    for name in ("ball", "ridge", "simplex"):
        for c in seeded_directions(3, 3, 8):
            body = fixture(name)
            verdicts = []
            for s in (1.0, 3.0):
                r = maximize_linear(body, s * c)
                verdicts.append(strong_criticality(body, r, extract_manifold(body, r)).strong)
            assert verdicts[0] == verdicts[1]


def test_ball_sensitivity_is_tangent_projector():
    body = fixture("ball")
    c = unit([0.3, -0.4, 0.8])
    r = maximize_linear(body, c)
    rep = sensitivity(body, c, extract_manifold(body, r), result=r)
    P = np.eye(3) - np.outer(c, c)
    np.testing.assert_allclose(rep.jac_fd, P, atol=1e-4)
    np.testing.assert_allclose(rep.jac_kkt, P, atol=1e-4)
    assert rep.jac_rank == 2 and rep.supported


def test_ridge_sensitivity_hand_elimination():
    body = fixture("ridge")
    c = np.array([0, 0, -1.0])
    r = maximize_linear(body, c)
    rep = sensitivity(body, c, extract_manifold(body, r), result=r)
    expected = np.zeros((3, 3))
    expected[0, 0] = 0.5
    np.testing.assert_allclose(rep.jac_kkt, expected, atol=1e-6)
    assert rep.discrepancy <= 1e-3 and rep.jac_rank == 1 == rep.manifold_dim


def test_box_vertex_sensitivity_zero():
    body = fixture("box")
    c = unit([1, 2, 3])
    r = maximize_linear(body, c)
    rep = sensitivity(body, c, extract_manifold(body, r), result=r)
    assert np.abs(rep.jac_kkt).max() == 0 and np.abs(rep.jac_fd).max() <= 1e-6 and rep.jac_rank == 0


def test_kkt_jacobian_matches_manual_bordered_solve():
    body = fixture("ridge")
    r = maximize_linear(body, np.array([0, 0, -1.0]))
    K = np.zeros((5, 5))
    K[0, 0] = 2 * (r.lam[0] + r.lam[1])
    K[:3, 3:] = np.array([[0, 1, -1], [0, -1, -1]], float).T
    K[3:, :3] = K[:3, 3:].T
    manual = np.linalg.solve(K, np.vstack([np.eye(3), np.zeros((2, 3))]))[:3]
    np.testing.assert_allclose(kkt_jacobian(body, np.zeros(3), r.lam, (0, 1)), manual, atol=1e-9)


def test_input_and_sampling_errors():
    body, r, m = _solve("ball", unit([1, 0, 0]))
    with pytest.raises(InputError):
        quadratic_decay(body, r, 0.5, 50)
    with pytest.raises(InputError):
        quadratic_decay(body, r, 5.0, 200)
    with pytest.raises(SamplingError):
        quadratic_decay(body, r, 1e-8, 200)
    bad = manifold_at(fixture("bad_square"), np.zeros(3), (0, 1))
    with pytest.raises(InputError):
        strong_criticality(fixture("bad_square"), maximize_linear(fixture("bad_square"), [0, 0, -1.0]), bad)


def test_decay_along_manifold_ball_is_half():
    body, r, m = _solve("ball", unit([0.1, 0.2, 0.9]))
    rep = decay_along_manifold(body, r, m)
    assert rep.delta_hat == pytest.approx(0.5, abs=1e-3)
