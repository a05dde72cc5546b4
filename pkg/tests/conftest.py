import numpy as np
import pytest

from powergame import (
    GameConfig,
    PlayerParams,
    Scenario1,
    Scenario2,
)


def make_players(count, cost, lam, mu, cap, prefix="p"):
    return tuple(
        PlayerParams(id=f"{prefix}{i}", cost=cost, arrival_rate=lam,
                     departure_rate=mu, max_power=cap)
        for i in range(count)
    )


@pytest.fixture
def one_player_streamed():
    """Hand-solved single-player streamed-reward game.

    r=100, beta=1, c=0.1, ell=10, cap=1000, lam=mu=1.
    psi = sqrt(r*beta*ell/c) = 100 exactly, investment 90,
    Z({0}) = 81/2, R = [27, 54], static utility 81.
    """
    return GameConfig(
        players=make_players(1, cost=0.1, lam=1.0, mu=1.0, cap=1000.0),
        reward=100.0,
        fixed_power=10.0,
        scenario=Scenario2(beta=1.0),
    )


@pytest.fixture
def one_player_streamed_static(one_player_streamed):
    """Same game with churn switched off: R({0}) = Z({0}) = 81."""
    p = one_player_streamed.players[0]
    frozen = PlayerParams(id=p.id, cost=p.cost, arrival_rate=0.0,
                          departure_rate=0.0, max_power=p.max_power)
    return GameConfig(
        players=(frozen,),
        reward=one_player_streamed.reward,
        fixed_power=one_player_streamed.fixed_power,
        scenario=one_player_streamed.scenario,
    )


@pytest.fixture
def two_player_winner():
    """Hand-solved two-player winner-takes-reward game.

    r=100, gamma=1/20 (so gamma*r = 5), costs (1, 7): player a invests its
    cap 40 everywhere, player b sits out.  With lam=(2,3), mu=(1,4), ell=10:
    D = (11/2, 13/2, 13/2, 15/2), slack = (1/11, 5/13, 1/13, 1/3),
    Z_a = (0, 320/13, 0, 64/3) and R_a = (1280/27, 1600/27, 1280/27, 1600/27)
    by exact elimination; R_b is identically zero.
    """
    return GameConfig(
        players=(
            PlayerParams(id="a", cost=1.0, arrival_rate=2.0, departure_rate=1.0,
                         max_power=40.0),
            PlayerParams(id="b", cost=7.0, arrival_rate=3.0, departure_rate=4.0,
                         max_power=60.0),
        ),
        reward=100.0,
        fixed_power=10.0,
        scenario=Scenario1(gamma=0.05),
    )


@pytest.fixture
def homogeneous_streamed():
    """Homogeneous streamed-reward factory: n identical players."""

    def build(n, lam=1.0, mu=3.0):
        return GameConfig(
            players=make_players(n, cost=0.5, lam=lam, mu=mu, cap=1e4),
            reward=200.0,
            fixed_power=5.0,
            scenario=Scenario2(beta=2.0),
        )

    return build


@pytest.fixture
def homogeneous_winner():
    """Homogeneous winner-takes-reward factory: n identical players."""

    def build(n, lam=0.7, mu=1.3):
        return GameConfig(
            players=make_players(n, cost=1.0, lam=lam, mu=mu, cap=40.0),
            reward=100.0,
            fixed_power=10.0,
            scenario=Scenario1(gamma=0.05),
        )

    return build


def random_substochastic(rng, size, density=0.4, max_row_sum=0.95):
    """Random strictly substochastic transition structure as a dense array."""
    w = rng.uniform(0.0, 1.0, (size, size)) * (rng.uniform(size=(size, size)) < density)
    np.fill_diagonal(w, 0.0)
    sums = w.sum(axis=1)
    targets = rng.uniform(0.1, max_row_sum, size)
    scale = np.where(sums > 0, targets / np.maximum(sums, 1e-300), 0.0)
    return w * scale[:, None]


def as_transition(dense):
    """Wrap a dense substochastic array in the solver's CSR container."""
    import scipy.sparse as sp

    from powergame.dynamics import TransitionMatrix

    csr = sp.csr_matrix(dense)
    csr.sort_indices()
    return TransitionMatrix(
        indptr=csr.indptr.astype(np.int64),
        indices=csr.indices.astype(np.int64),
        data=np.ascontiguousarray(csr.data, dtype=np.float64),
        row_slack=1.0 - np.asarray(dense).sum(axis=1),
    )
