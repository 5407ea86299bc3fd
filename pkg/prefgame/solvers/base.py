import logging
from typing import Callable, Optional

import numpy as np
from scipy.special import softmax

from prefgame.core.dynamics import occupancy_measure
from prefgame.core.errors import DomainError, NumericalError
from prefgame.data.game import PreferenceGame
from prefgame.data.policy import OccupancyMeasure, Policy

l = logging.getLogger(__name__)


class SolverState:
    """
    The iterate of a self-play solver: the current and previous policies with their occupancy
    measures, at iteration t. At t = 1 the previous iterate equals the current one.
    """

    __slots__ = (
        "pi",
        "pi_prev",
        "d",
        "d_prev",
        "t",
    )

    def __init__(self, pi: Policy, pi_prev: Policy, d: OccupancyMeasure, d_prev: OccupancyMeasure, t: int):
        self.pi = pi
        self.pi_prev = pi_prev
        self.d = d
        self.d_prev = d_prev
        self.t = t

    @classmethod
    def initial(cls, game: PreferenceGame, policy: Optional[Policy] = None) -> "SolverState":
        pi = policy if policy is not None else Policy.uniform(game)
        pi.check_compatible(game)
        d = occupancy_measure(game, pi)
        return cls(pi, pi, d, d, 1)

    def advance(self, game: PreferenceGame, new_pi: Policy) -> "SolverState":
        return SolverState(new_pi, self.pi, occupancy_measure(game, new_pi), self.d, self.t + 1)

    def __repr__(self):
        return f"<SolverState t={self.t}>"


def stage_betas(beta: float, horizon: int) -> np.ndarray:
    """
    beta_h = beta / (number of remaining stages), i.e. beta / (H - h) for 0-based stages.
    """
    return beta / (horizon - np.arange(horizon, dtype=np.float64))


def mwu_update(policy: Policy, q_values: np.ndarray, betas: np.ndarray) -> Policy:
    """
    pi_h(a|s) proportional to policy_h(a|s) exp(betas[h] * q_values[h, s, a]), in the log domain.
    """
    logits = policy.log_probs + betas[:, None, None] * q_values
    if np.any(np.isnan(logits)) or np.any(np.isposinf(logits)):
        raise NumericalError("non-finite logits in the multiplicative-weights update")
    return Policy(softmax(logits, axis=-1))


def merge_by_initial_state(game: PreferenceGame, per_initial: Callable[[int, int], np.ndarray]) -> np.ndarray:
    """
    Evaluates per_initial(i, s1) -> array[h, s, ...] for every initial state and keeps, for each
    state, the rows computed for the initial state it belongs to.
    """
    merged = None
    for i, s1 in enumerate(game.initial_states):
        values = per_initial(i, int(s1))
        if merged is None:
            merged = np.zeros_like(values)
        mask = game.states_of(s1)
        merged[:, mask] = values[:, mask]
    if merged is None:
        raise DomainError("the game has no initial state")
    return merged
