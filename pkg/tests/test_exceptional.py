import numpy as np
import pytest

from tame_opt_lab.body import fixture
from tame_opt_lab.errors import InputError
from tame_opt_lab.exceptional import exceptional_distance
from tame_opt_lab.solver import maximize_linear

from oracles import unit


def test_ball_has_empty_set():
    assert exceptional_distance("ball", [1, 2, 3]) == float("inf")


def test_box_distance_to_coordinate_planes():
    assert exceptional_distance("box", [1, 1, 0]) == 0.0
    c = unit([1, 2, 3])
    assert exceptional_distance("box", c) == pytest.approx(np.arcsin(c[0]))


def test_simplex_tie_is_zero():
    assert exceptional_distance("simplex", [1, 1, -1]) == pytest.approx(0.0, abs=1e-15)
    assert exceptional_distance("simplex", [-1, -1, -1]) > 0.1


@pytest.mark.parametrize("c", [(0, -1, -1), (0, 1, -1), (0.2, -1, -1)])
def test_ridge_members(c):
    assert exceptional_distance("ridge", c) <= 2e-3


@pytest.mark.parametrize("c", [(0, 0, -1), (0.2, 0.2, -1), (-0.3, 0.3, -1)])
def test_bad_square_members(c):
    assert exceptional_distance("bad_square", c) <= 2e-3


def test_ridge_edge_direction_has_nonunique_maximizer():
    # on the edge family the optimal face is a segment: two solves from opposite tilts land apart
    body = fixture("ridge")
    base = unit([0.2, 1, -1])
    a = maximize_linear(body, unit(base + [0, 1e-3, 0])).x
    b = maximize_linear(body, unit(base - [0, 1e-3, 0])).x
    assert np.linalg.norm(a - b) > 0.05


def test_generic_direction_away_from_set():
    assert exceptional_distance("ridge", unit([0.1, 0.3, -1])) > 0.05
    assert exceptional_distance("bad_square", unit([0.2, 0.1, -1])) > 0.02


def test_errors():
    with pytest.raises(InputError):
        exceptional_distance("ridge", [0, 0, 0])
    with pytest.raises(InputError):
        exceptional_distance("nc_fail", [0, 0, 1])
