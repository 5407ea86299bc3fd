"""
Exact best responses and the equilibrium metrics derived from them.
"""
import logging
from typing import Tuple

import numpy as np

from prefgame.core.dynamics import occupancy_measure, opponent_reward, self_play_value
from prefgame.core.errors import NumericalError
from prefgame.data.game import PreferenceGame
from prefgame.data.policy import Policy

l = logging.getLogger(__name__)

NASH_GAP_TOL = 1e-10


class BestResponse:
    __slots__ = (
        "policy",
        "value",
    )

    def __init__(self, policy: Policy, value: float):
        self.policy = policy
        self.value = value

    def __repr__(self):
        return f"<BestResponse value={self.value:.6g}>"


def _optimal_response(game: PreferenceGame, policy: Policy, side: str) -> BestResponse:
    """
    Backward induction against the policy's occupancy: the responder maximizes its own stage
    reward, which is the preference for side="max" and its negation for side="min".
    Ties go to the lowest action index.
    """
    H, S, A = game.horizon, game.num_states, game.num_actions
    d = occupancy_measure(game, policy).d
    actions = np.zeros((H, S), dtype=np.int64)
    value = 0.0
    for i, s1 in enumerate(game.initial_states):
        rewards = opponent_reward(game, d[i], side=side)
        V = np.zeros(S)
        mask = game.states_of(s1)
        for h in reversed(range(H)):
            Q = rewards[h] + game.transition @ V
            best = np.argmax(Q, axis=-1)
            V = Q[np.arange(S), best]
            actions[h, mask] = best[mask]
        value += game.initial_dist[s1] * V[s1]

    if side == "min":
        value = -value
    return BestResponse(Policy.pure(game, actions), float(value))


def best_response(game: PreferenceGame, opponent: Policy) -> BestResponse:
    """
    The deterministic policy maximizing <nu_1, V^{pi, opponent}>.
    """
    opponent.check_compatible(game)
    return _optimal_response(game, opponent, "max")


def min_response(game: PreferenceGame, policy: Policy) -> BestResponse:
    """
    The deterministic policy minimizing <nu_1, V^{policy, pi}>, the best reply of the opponent.
    """
    policy.check_compatible(game)
    return _optimal_response(game, policy, "min")


def exploitability(game: PreferenceGame, policy: Policy) -> float:
    """
    Best-response value minus the self-play value H / 2, clipped at 0.
    """
    return max(0.0, best_response(game, policy).value - game.self_play_value)


def nash_gap(game: PreferenceGame, policy: Policy) -> Tuple[float, float]:
    """
    @return: (gain of a deviating max player, gain of a deviating min player)
    """
    value = self_play_value(game, policy)
    max_side = best_response(game, policy).value - value
    min_side = value - min_response(game, policy).value
    if abs(max_side - min_side) > NASH_GAP_TOL:
        raise NumericalError(f"the two sides of the Nash gap differ: {max_side:.12g} vs {min_side:.12g}")
    return float(max_side), float(min_side)


#
# Iteration bounds
#

def uniform_occupancy_floor(game: PreferenceGame) -> float:
    """
    The smallest positive entry of the uniform policy's occupancy measure.
    """
    d = occupancy_measure(game, Policy.uniform(game)).d
    return float(d[d > 0].min())


def gap_bound(game: PreferenceGame, beta: float, iterations: int) -> float:
    """
    Upper bound on the Nash gap of the averaged OMPO iterate after `iterations` updates:
    10 H log(1 / d_min) / (beta T).
    """
    return 10.0 * game.horizon * np.log(1.0 / uniform_occupancy_floor(game)) / (beta * iterations)


def theoretical_iterations(game: PreferenceGame, beta: float, eps: float) -> int:
    """
    The number of OMPO updates after which the averaged iterate is an eps-approximate equilibrium.
    """
    return int(np.ceil(10.0 * game.horizon * np.log(1.0 / uniform_occupancy_floor(game)) / (beta * eps)))
