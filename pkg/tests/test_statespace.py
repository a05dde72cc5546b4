import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powergame.model import GameConfig, PlayerParams, Scenario2
from powergame.statespace import (
    EXACT_PLAYER_CAP,
    ExactSpace,
    MalformedStateError,
    ReducedSpace,
    build_space,
    inverse,
    neighbors,
    ordinal,
)

from conftest import make_players


class TestExactSpace:
    def test_size_and_shape(self):
        space = ExactSpace(3)
        assert space.size == 8
        assert space.policy_shape == (8, 3)
        assert space.mode == "exact"

    def test_ordinal_is_bitmask(self):
        space = ExactSpace(4)
        assert space.ordinal([]) == 0
        assert space.ordinal([0, 2]) == 5
        assert space.ordinal({3}) == 8

    def test_ordinal_rejects_out_of_range(self):
        space = ExactSpace(3)
        with pytest.raises(MalformedStateError):
            space.ordinal([3])
        with pytest.raises(MalformedStateError):
            space.ordinal([-1])

    def test_inverse(self):
        space = ExactSpace(4)
        assert space.inverse(5) == frozenset({0, 2})
        assert space.inverse(0) == frozenset()
        with pytest.raises(MalformedStateError):
            space.inverse(16)

    def test_player_cap(self):
        ExactSpace(EXACT_PLAYER_CAP)
        with pytest.raises(MalformedStateError):
            ExactSpace(EXACT_PLAYER_CAP + 1)
        with pytest.raises(MalformedStateError):
            ExactSpace(0)

    def test_neighbors_order_and_targets(self):
        space = ExactSpace(3)
        edges = space.neighbors({1})
        assert edges[0].kind == "absorb"
        assert edges[0].target_ordinal is None
        # arrivals of absent players in ascending index order
        assert [(e.kind, e.player, e.target_ordinal) for e in edges[1:3]] == [
            ("arrive", 0, 3), ("arrive", 2, 6),
        ]
        # then departures of present players
        assert (edges[3].kind, edges[3].player, edges[3].target_ordinal) == (
            "depart", 1, 0)
        assert all(e.count == 1 for e in edges)

    def test_presence(self):
        space = ExactSpace(3)
        present = space.presence(1)
        assert present.dtype == bool
        assert list(np.nonzero(present)[0]) == [2, 3, 6, 7]
        assert not present.flags.writeable

    def test_state_sizes_popcount(self):
        space = ExactSpace(3)
        expected = [bin(s).count("1") for s in range(8)]
        assert list(space.state_sizes()) == expected

    def test_total_investment(self):
        space = ExactSpace(2)
        inv = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0], [7.0, 8.0]])
        # only present players contribute
        assert list(space.total_investment(inv)) == [0.0, 3.0, 6.0, 15.0]


class TestReducedSpace:
    def test_size_and_shape(self):
        space = ReducedSpace(5)
        assert space.size == 10
        assert space.policy_shape == (10, 2)
        assert space.mode == "reduced"

    def test_ordinal_layout(self):
        space = ReducedSpace(4)
        assert space.ordinal((0, 0)) == 0
        assert space.ordinal((0, 3)) == 3
        assert space.ordinal((1, 0)) == 4
        assert space.ordinal((1, 3)) == 7

    def test_ordinal_rejects_bad_states(self):
        space = ReducedSpace(3)
        with pytest.raises(MalformedStateError):
            space.ordinal((2, 0))
        with pytest.raises(MalformedStateError):
            space.ordinal((0, 3))
        with pytest.raises(MalformedStateError):
            space.ordinal((1, -1))

    def test_inverse(self):
        space = ReducedSpace(4)
        assert space.inverse(6) == (1, 2)
        with pytest.raises(MalformedStateError):
            space.inverse(8)

    def test_neighbors_bottom_state(self):
        space = ReducedSpace(4)
        edges = space.neighbors((0, 0))
        kinds = [e.kind for e in edges]
        assert kinds == ["absorb", "focal_arrive", "others_arrive"]
        assert edges[1].target_ordinal == space.ordinal((1, 0))
        assert edges[2].count == 3

    def test_neighbors_full_house(self):
        space = ReducedSpace(4)
        edges = space.neighbors((1, 3))
        kinds = [e.kind for e in edges]
        assert kinds == ["absorb", "focal_depart", "others_depart"]
        assert edges[1].target_ordinal == space.ordinal((0, 3))
        assert edges[2].count == 3

    def test_vector_views(self):
        space = ReducedSpace(3)
        assert list(space.focal_present()) == [0, 0, 0, 1, 1, 1]
        assert list(space.other_counts()) == [0, 1, 2, 0, 1, 2]
        assert list(space.state_sizes()) == [0, 1, 2, 1, 2, 3]
        assert not space.focal_present().flags.writeable

    def test_total_investment(self):
        space = ReducedSpace(3)
        inv = np.tile([10.0, 2.0], (6, 1))
        assert list(space.total_investment(inv)) == [0, 2, 4, 10, 12, 14]


class TestBuildSpace:
    def test_auto_prefers_exact(self, two_player_winner):
        assert isinstance(build_space(two_player_winner), ExactSpace)

    def test_auto_switches_past_cap(self):
        cfg = GameConfig(players=make_players(EXACT_PLAYER_CAP + 1, 1, 1, 1, 10),
                         reward=10.0, fixed_power=1.0, scenario=Scenario2(beta=1.0))
        assert isinstance(build_space(cfg), ReducedSpace)

    def test_reduced_needs_homogeneous(self, two_player_winner):
        with pytest.raises(MalformedStateError):
            build_space(two_player_winner, mode="reduced")

    def test_unknown_mode(self, two_player_winner):
        with pytest.raises(ValueError):
            build_space(two_player_winner, mode="dense")

    def test_module_level_wrappers(self):
        space = ExactSpace(3)
        assert ordinal(space, [0, 1]) == 3
        assert inverse(space, 3) == frozenset({0, 1})
        assert neighbors(space, [0, 1])[0].kind == "absorb"


@given(st.integers(min_value=1, max_value=12), st.data())
@settings(max_examples=60)
def test_exact_ordinal_bijection(n, data):
    space = ExactSpace(n)
    subset = data.draw(st.sets(st.integers(min_value=0, max_value=n - 1)))
    k = space.ordinal(subset)
    assert 0 <= k < space.size
    assert space.inverse(k) == frozenset(subset)


@given(st.integers(min_value=1, max_value=50))
@settings(max_examples=40)
def test_reduced_ordinal_bijection(n):
    space = ReducedSpace(n)
    seen = set()
    for k in range(space.size):
        state = space.inverse(k)
        assert space.ordinal(state) == k
        seen.add(state)
    assert len(seen) == space.size


@given(st.integers(min_value=1, max_value=10), st.data())
@settings(max_examples=60)
def test_exact_neighbors_partition(n, data):
    """Every non-absorb edge flips exactly one player's presence bit."""
    space = ExactSpace(n)
    subset = data.draw(st.sets(st.integers(min_value=0, max_value=n - 1)))
    mask = space.ordinal(subset)
    edges = space.neighbors(subset)
    assert edges[0].kind == "absorb"
    targets = set()
    for e in edges[1:]:
        flipped = mask ^ e.target_ordinal
        assert flipped and (flipped & (flipped - 1)) == 0
        targets.add(e.target_ordinal)
    assert len(targets) == n
