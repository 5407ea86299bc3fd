import logging

import numpy as np

from prefgame.core.dynamics import occupancy_measure, opponent_reward, policy_evaluation
from prefgame.data.game import PreferenceGame
from prefgame.data.policy import Policy
from prefgame.solvers.base import merge_by_initial_state, mwu_update

l = logging.getLogger(__name__)


def mpo_q(game: PreferenceGame, policy: Policy) -> np.ndarray:
    """
    E_{S', A' ~ d^pi_h} Q_h^{pi, pi}(s, a, S', A'), the Q values of self-play against the policy's
    own occupancy. Computed as the single player Q of the reward marginalized over the opponent.
    """
    d = occupancy_measure(game, policy).d

    def per_initial(i, s1):
        return policy_evaluation(game, policy, opponent_reward(game, d[i]))[0]

    return merge_by_initial_state(game, per_initial)


def mpo_step(game: PreferenceGame, pi_t: Policy, beta: float) -> Policy:
    """
    Natural actor-critic update with the same learning rate at every stage.
    """
    q = mpo_q(game, pi_t)
    return mwu_update(pi_t, q, np.full(game.horizon, float(beta)))
