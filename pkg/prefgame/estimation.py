"""
Monte-Carlo estimation of the Q values the solvers use, from sampled episodes of the two
players. Every rollout of a player is conditioned by construction: it starts in the queried
(stage, state, action) instead of being filtered afterwards.
"""
import logging
from typing import List, Optional, Tuple

import numpy as np

from prefgame.core.dynamics import reachable_states
from prefgame.core.errors import DomainError
from prefgame.data.game import PreferenceGame
from prefgame.data.policy import Policy

l = logging.getLogger(__name__)


class Trajectory:
    """
    An episode from its first step to the horizon: steps[k] = (stage, state, action).
    """

    __slots__ = (
        "initial_state",
        "steps",
    )

    def __init__(self, initial_state: int, steps: List[Tuple[int, int, int]]):
        self.initial_state = initial_state
        self.steps = steps

    def __len__(self):
        return len(self.steps)

    def __repr__(self):
        return f"<Trajectory from {self.initial_state}: {self.steps}>"


class EstimatorReport:
    __slots__ = (
        "estimate",
        "num_samples",
        "std_error",
    )

    def __init__(self, estimate: float, num_samples: int, std_error: float):
        self.estimate = estimate
        self.num_samples = num_samples
        self.std_error = std_error

    @classmethod
    def from_samples(cls, samples: np.ndarray) -> "EstimatorReport":
        k = len(samples)
        std_error = float(np.std(samples, ddof=1) / np.sqrt(k)) if k > 1 else 0.0
        return cls(float(np.mean(samples)), k, std_error)

    def within(self, value: float, num_std=3.0) -> bool:
        return abs(self.estimate - value) <= num_std * self.std_error

    def __repr__(self):
        return f"<EstimatorReport {self.estimate:.6g} +- {self.std_error:.3g} (K={self.num_samples})>"


#
# Sampling
#

def sample_categorical(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    One draw from every row of `probs` (... x n) by inverting the cumulative distribution.
    """
    cdf = np.cumsum(probs, axis=-1)
    u = rng.random(probs.shape[:-1]) * cdf[..., -1]
    idx = (u[..., None] >= cdf).sum(axis=-1)
    return np.minimum(idx, probs.shape[-1] - 1)


def _check_start(game: PreferenceGame, h: int, s: int, a: Optional[int]) -> int:
    if not 0 <= h < game.horizon:
        raise DomainError(f"stage {h} is outside of [0, {game.horizon})")
    if not 0 <= s < game.num_states:
        raise DomainError(f"unknown state {s}")
    if a is not None and not 0 <= a < game.num_actions:
        raise DomainError(f"unknown action {a}")

    s1 = int(game.init_partition[s])
    if s not in reachable_states(game, s1)[h]:
        raise DomainError(f"state {s} is not reachable at stage {h}")
    return s1


def rollout_batch(game: PreferenceGame, policy: Policy, h: int, states: np.ndarray, rng: np.random.Generator,
                  forced_action: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Samples len(states) independent episodes from stage h to the horizon.

    @return: states[K, H - h], actions[K, H - h]
    """
    K, H = len(states), game.horizon
    S_out = np.empty((K, H - h), dtype=np.int64)
    A_out = np.empty((K, H - h), dtype=np.int64)
    s = np.asarray(states, dtype=np.int64)
    for k, tau in enumerate(range(h, H)):
        if k == 0 and forced_action is not None:
            a = np.full(K, forced_action, dtype=np.int64)
        else:
            a = sample_categorical(policy.probs[tau][s], rng)
        S_out[:, k], A_out[:, k] = s, a
        if tau < H - 1:
            s = sample_categorical(game.transition[s, a], rng)
    return S_out, A_out


def sample_trajectory(game: PreferenceGame, policy: Policy, start: Tuple, rng: np.random.Generator) -> Trajectory:
    """
    @param start:   (stage, state) or (stage, state, forced action)
    """
    h, s = int(start[0]), int(start[1])
    a = start[2] if len(start) > 2 else None
    s1 = _check_start(game, h, s, a)
    states, actions = rollout_batch(game, policy, h, np.array([s]), rng, forced_action=a)
    steps = [(h + k, int(states[0, k]), int(actions[0, k])) for k in range(states.shape[1])]
    return Trajectory(s1, steps)


def _pair_rewards(game: PreferenceGame, S, A, S_opp, A_opp) -> np.ndarray:
    return game.reward[S, A, S_opp, A_opp].sum(axis=1)


#
# Estimators
#

def mc_q_ompo(game: PreferenceGame, pi_t: Policy, pi_prev: Optional[Policy], h: int, s: int, a: int, K: int,
              rng: np.random.Generator) -> EstimatorReport:
    """
    Estimates the OMPO Q value of (s, a) at stage h: the player rolls out from (h, s, a) under
    pi_t, two opponents roll out from the initial state under pi_t and pi_prev, and every sample
    sums 2 r(player, first opponent) - r(player, second opponent) from stage h on.
    Without pi_prev (the first iteration) the sample is the plain sum of r(player, opponent).
    """
    if K <= 0:
        raise DomainError(f"the number of samples must be positive, got {K}")
    s1 = _check_start(game, h, s, a)

    S, A = rollout_batch(game, pi_t, h, np.full(K, s), rng, forced_action=a)
    starts = np.full(K, s1)
    S1, A1 = rollout_batch(game, pi_t, 0, starts, rng)
    samples = _pair_rewards(game, S, A, S1[:, h:], A1[:, h:])
    if pi_prev is not None:
        S2, A2 = rollout_batch(game, pi_prev, 0, starts, rng)
        samples = 2.0 * samples - _pair_rewards(game, S, A, S2[:, h:], A2[:, h:])
    return EstimatorReport.from_samples(samples)


def mc_q_mpo(game: PreferenceGame, pi_t: Policy, h: int, s: int, a: int, K: int,
             rng: np.random.Generator) -> EstimatorReport:
    """
    Estimates E_{A' ~ pi_t} Q_h^{pi_t, pi_t}(s, a, s, A') from paired rollouts that both start in
    state s at stage h, the player with action a and the opponent with a sampled action.
    """
    if K <= 0:
        raise DomainError(f"the number of samples must be positive, got {K}")
    _check_start(game, h, s, a)

    S, A = rollout_batch(game, pi_t, h, np.full(K, s), rng, forced_action=a)
    S_opp, A_opp = rollout_batch(game, pi_t, h, np.full(K, s), rng)
    return EstimatorReport.from_samples(_pair_rewards(game, S, A, S_opp, A_opp))
