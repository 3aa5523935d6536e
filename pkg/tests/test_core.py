import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from lama.core import LandmarkSet, NodeGrid, node_location, project_all, winner, winner_pair


@pytest.mark.parametrize(
    "k, kx, ky, expected",
    [(15, 4, 4, (3, 3)), (0, 4, 4, (0, 0)), (0, 7, 3, (0, 0)), (312, 25, 25, (12, 12))],
)
def test_node_location(k, kx, ky, expected):
    assert tuple(node_location(k, NodeGrid(kx, ky))) == expected


def test_node_location_out_of_range():
    with pytest.raises(IndexError):
        node_location(16, NodeGrid(4, 4))
    with pytest.raises(IndexError):
        node_location(-1, NodeGrid(4, 4))


@given(st.integers(1, 12), st.integers(1, 12))
def test_row_major_bijection(kx, ky):
    g = NodeGrid(kx, ky)
    locs = {tuple(node_location(k, g)) for k in range(g.size)}
    assert len(locs) == g.size
    for k in range(g.size):
        assert tuple(g.locations[k]) == (k % kx, k // kx)
        assert g.index(*map(int, g.locations[k])) == k


def test_unit_spacing():
    g = NodeGrid(5, 4)
    assert g.distance(0, 1) == 1.0
    assert g.distance(0, 5) == 1.0
    assert g.distance(0, 6) == pytest.approx(np.sqrt(2))


def test_grid_rejects_bad_sizes():
    with pytest.raises(ValueError):
        NodeGrid(0, 3)


def test_winner_exact_match():
    rng = np.random.default_rng(1)
    W = rng.random((10, 3)) + 5.0
    x = np.array([0.2, 0.3, 0.4])
    W[7] = x
    assert winner(W, x) == 7


def test_winner_ties_go_to_lowest_index():
    W = np.ones((6, 2))
    assert winner(W, np.zeros(2)) == 0


def test_winner_shape_error():
    with pytest.raises(ValueError):
        winner(np.zeros((4, 3)), np.zeros(2))


@pytest.mark.parametrize("seed", range(10))
def test_winner_matches_exhaustive_scan(seed):
    rng = np.random.default_rng(seed)
    W, x = rng.random((16, 3)), rng.random(3)
    assert winner(W, x) == oracles.argmin_scan(W.tolist(), x.tolist())


def test_winner_pair_ordered():
    W = np.array([[0.0], [1.0], [2.0]])
    assert winner_pair(W, np.array([0.0])) == (0, 1)


def test_winner_pair_tie_on_second():
    W = np.full((6, 2), 10.0)
    x = np.zeros(2)
    W[0] = x
    W[3] = [1.0, 0.0]
    W[5] = [0.0, 1.0]
    assert winner_pair(W, x) == (0, 3)


def test_winner_pair_needs_two_nodes():
    with pytest.raises(ValueError):
        winner_pair(np.zeros((1, 2)), np.zeros(2))


@pytest.mark.parametrize("seed", range(10))
def test_winner_pair_matches_sort(seed):
    rng = np.random.default_rng(100 + seed)
    W, x = rng.random((16, 3)), rng.random(3)
    assert winner_pair(W, x) == oracles.pair_by_sort(W.tolist(), x.tolist())


def test_project_all():
    rng = np.random.default_rng(3)
    W = rng.random((9, 4))
    assert project_all(W, W[4:5]).tolist() == [4]
    assert project_all(W, W).tolist() == list(range(9))
    X = rng.random((12, 4))
    assert project_all(W, X).tolist() == [oracles.argmin_scan(W.tolist(), x) for x in X.tolist()]
    with pytest.raises(ValueError):
        project_all(W, rng.random((3, 2)))


finite = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=60)
@given(arrays(np.float64, (8, 3), elements=finite), arrays(np.float64, 3, elements=finite))
def test_winner_pair_first_equals_winner(W, x):
    assert winner_pair(W, x)[0] == winner(W, x)


@settings(max_examples=60)
@given(arrays(np.float64, (8, 3), elements=finite), arrays(np.float64, 3, elements=finite), st.floats(1.5, 10))
def test_winner_ignores_farther_rows(W, x, factor):
    k = winner(W, x)
    d = np.sqrt(np.sum((W[k] - x) ** 2))
    far = x + np.array([d * factor + 1.0, 0, 0])
    assert winner(np.vstack([W, far]), x) == k


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1))
def test_winner_commutes_with_permutation(seed):
    rng = np.random.default_rng(seed)
    W, x = rng.random((12, 3)), rng.random(3)
    perm = rng.permutation(12)
    assert perm[winner(W[perm], x)] == winner(W, x)


def test_landmark_set_validation():
    with pytest.raises(ValueError):
        LandmarkSet(np.zeros((2, 3)), [4, 4])
    lm = LandmarkSet(np.zeros((1, 3)), [20])
    with pytest.raises(IndexError):
        lm.check(NodeGrid(4, 4))
    assert len(LandmarkSet.empty(3)) == 0
