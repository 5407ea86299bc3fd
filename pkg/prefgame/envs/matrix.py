"""
Single-state games built from an action preference matrix, repeated for H stages.
"""
import numpy as np

from prefgame.core.errors import DomainError
from prefgame.data.game import PreferenceGame
from prefgame.envs.preferences import cyclic_preference, dominant_preference, tie_preference


def matrix_game(reward: np.ndarray, horizon: int = 1, name=None) -> PreferenceGame:
    """
    @param reward:  1 x A x 1 x A preference tensor
    """
    reward = np.asarray(reward, dtype=np.float64)
    num_actions = reward.shape[1]
    transition = np.ones((1, num_actions, 1))
    return PreferenceGame(transition, np.ones(1), reward, horizon, name=name)


def rps(horizon: int = 1) -> PreferenceGame:
    """
    Rock-paper-scissors with actions ordered [rock, scissors, paper]: every action beats the next one.
    """
    return matrix_game(cyclic_preference(3, p=1.0), horizon=horizon, name="rps")


def weighted_rps(wins=(0.9, 0.95, 1.0), horizon: int = 1) -> PreferenceGame:
    """
    Rock-paper-scissors where action i beats action i + 1 (mod 3) with probability wins[i].
    When every win probability exceeds 1/2 the unique equilibrium is fully mixed, see
    weighted_rps_equilibrium.
    """
    wins = np.asarray(wins, dtype=np.float64)
    if wins.shape != (3,) or np.any(wins < 0) or np.any(wins > 1):
        raise DomainError(f"expected three win probabilities in [0, 1], got {wins.tolist()}")

    reward = np.full((3, 3), 0.5)
    for i in range(3):
        j = (i + 1) % 3
        reward[i, j], reward[j, i] = wins[i], 1.0 - wins[i]
    return matrix_game(reward[None, :, None, :], horizon=horizon, name="weighted-rps")


def weighted_rps_equilibrium(wins) -> np.ndarray:
    """
    Equilibrium of weighted_rps: each action is played in proportion to the margin by which
    the action it beats wins against the third one. Only meaningful when all wins exceed 1/2.
    """
    margins = np.roll(np.asarray(wins, dtype=np.float64) - 0.5, -1)
    return margins / margins.sum()


def dom2(horizon: int = 1) -> PreferenceGame:
    return matrix_game(dominant_preference(), horizon=horizon, name="dom2")


def cyclic_game(num_actions: int = 3, p: float = 2.0 / 3.0, horizon: int = 1) -> PreferenceGame:
    return matrix_game(cyclic_preference(num_actions, p), horizon=horizon, name=f"cyclic-{num_actions}")


def tie_game(num_actions: int = 2, horizon: int = 1) -> PreferenceGame:
    return matrix_game(tie_preference(1, num_actions), horizon=horizon, name="tie")
