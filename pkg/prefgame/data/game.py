import logging
from typing import Optional

import numpy as np

from prefgame.core.errors import DomainError
from prefgame.data.artifact import Artifact

l = logging.getLogger(__name__)

STOCHASTIC_TOL = 1e-12
RENORMALIZE_TOL = 1e-9


def renormalize(probs: np.ndarray, strict=True, what="distribution") -> np.ndarray:
    """
    Renormalizes the last axis of `probs`. Rows within RENORMALIZE_TOL of being stochastic are
    rescaled silently. Rows further away raise a DomainError when `strict`, otherwise they are
    returned untouched so that validation can report them.

    @param probs:   array whose last axis holds distributions
    @param strict:  raise instead of leaving bad rows as they are
    @param what:    name used in the error message
    @return:        a new array
    """
    probs = np.array(probs, dtype=np.float64)
    sums = probs.sum(axis=-1, keepdims=True)
    bad = (np.abs(sums - 1.0) > RENORMALIZE_TOL) | np.any(probs < 0, axis=-1, keepdims=True)
    if strict and np.any(bad):
        idx = tuple(int(i) for i in np.argwhere(bad[..., 0])[0])
        raise DomainError(f"{what} at index {list(idx)} is not a probability distribution")

    # rows already stochastic within STOCHASTIC_TOL are kept bit for bit
    fixable = ~bad & (sums > 0) & (np.abs(sums - 1.0) > STOCHASTIC_TOL)
    return np.where(fixable, probs / np.where(sums > 0, sums, 1.0), probs)


class PreferenceGame(Artifact):
    """
    A finite-horizon two-player constant-sum Markov game induced by a preference oracle.

    Both players act in their own copy of the MDP (num_states, num_actions, transition, horizon,
    initial_dist) starting from the same initial state. At every stage the max player collects
    reward[s, a, s', a'] = P([s, a] > [s', a']) and the min player collects the complement.

    :ivar int num_states:           |S|
    :ivar int num_actions:          |A|
    :ivar int horizon:              H
    :ivar ndarray transition:       f(s'|s,a) stored as an array S x A x S'
    :ivar ndarray initial_dist:     nu_1 over S
    :ivar ndarray reward:           r(s,a,s',a') stored as an array S x A x S x A
    :ivar ndarray init_partition:   the initial state every state can be reached from
    """

    __slots__ = (
        "name",
        "num_states",
        "num_actions",
        "horizon",
        "transition",
        "initial_dist",
        "reward",
        "init_partition",
        "_flat_reward",
    )

    ARRAY_FIELDS = {
        "transition": np.float64,
        "initial_dist": np.float64,
        "reward": np.float64,
        "init_partition": np.int64,
    }

    def __init__(self, transition, initial_dist, reward, horizon, init_partition=None, name=None):
        self.name = name
        self.transition = np.asarray(transition, dtype=np.float64)
        self.initial_dist = np.asarray(initial_dist, dtype=np.float64)
        self.reward = np.asarray(reward, dtype=np.float64)
        self.horizon = int(horizon)
        self.init_partition = None if init_partition is None else np.asarray(init_partition, dtype=np.int64)
        self._finalize()

    def __setstate__(self, state):
        for k in ("transition", "initial_dist", "reward", "horizon"):
            if state.get(k, None) is None:
                raise DomainError(f"missing game field {k}")
        super(PreferenceGame, self).__setstate__(state)
        self.horizon = int(self.horizon)
        self._finalize()

    def _finalize(self):
        if self.transition.ndim != 3 or self.transition.shape[0] != self.transition.shape[2]:
            raise DomainError(f"transition must have shape (S, A, S), got {self.transition.shape}")

        self.num_states, self.num_actions = int(self.transition.shape[0]), int(self.transition.shape[1])
        S, A = self.num_states, self.num_actions
        if self.horizon < 1:
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        if self.initial_dist.shape != (S,):
            raise DomainError(f"initial_dist must have shape ({S},), got {self.initial_dist.shape}")
        if self.reward.shape != (S, A, S, A):
            raise DomainError(f"reward must have shape {(S, A, S, A)}, got {self.reward.shape}")

        # accumulated float drift is fixed here, genuine errors are left for validate_game
        self.transition = renormalize(self.transition, strict=False)
        self.initial_dist = renormalize(self.initial_dist, strict=False)

        if self.init_partition is None:
            self.init_partition = self._default_partition()
        elif self.init_partition.shape != (S,):
            raise DomainError(f"init_partition must have shape ({S},), got {self.init_partition.shape}")

        self._flat_reward = None

    def _default_partition(self) -> np.ndarray:
        from prefgame.core.dynamics import reachable_states

        starts = self.initial_states
        partition = np.full(self.num_states, starts[0] if len(starts) else 0, dtype=np.int64)
        # the first initial state to reach a state claims it; overlaps are reported by validate_game
        for s1 in reversed(starts):
            for stage in reachable_states(self, int(s1)):
                partition[list(stage)] = s1
        return partition

    #
    # Properties
    #

    @property
    def initial_states(self) -> np.ndarray:
        return np.flatnonzero(self.initial_dist > 0)

    @property
    def flat_reward(self) -> np.ndarray:
        """
        The reward as a (S*A) x (S*A) matrix, rows indexed by the max player.
        """
        if self._flat_reward is None:
            n = self.num_states * self.num_actions
            self._flat_reward = self.reward.reshape(n, n)
        return self._flat_reward

    @property
    def self_play_value(self) -> float:
        return self.horizon / 2.0

    def initial_index(self, s1: int) -> int:
        """
        Position of `s1` among the initial states (the first axis of an OccupancyMeasure).
        """
        matches = np.flatnonzero(self.initial_states == s1)
        if len(matches) == 0:
            raise DomainError(f"state {s1} is not in the support of the initial distribution")
        return int(matches[0])

    def states_of(self, s1: int) -> np.ndarray:
        return self.init_partition == s1

    def copy(self):
        return PreferenceGame(
            self.transition.copy(), self.initial_dist.copy(), self.reward.copy(), self.horizon,
            init_partition=self.init_partition.copy(), name=self.name
        )

    def __getstate__(self):
        state = super(PreferenceGame, self).__getstate__()
        # derived from the arrays
        state.pop("num_states")
        state.pop("num_actions")
        return state

    def summary(self) -> str:
        return f"{self.name or 'game'}(|S|={self.num_states}, |A|={self.num_actions}, H={self.horizon})"


def load_game_state(state: dict, rng: Optional[np.random.Generator] = None) -> PreferenceGame:
    """
    Builds a game from a parsed game file. The reward may be given as nested arrays or as a
    generator spec table, e.g. {kind = "cyclic", p = 0.6667}.
    """
    state = dict(state)
    reward = state.get("reward", None)
    if isinstance(reward, dict):
        from prefgame.data.config import PreferenceSpec
        from prefgame.envs.preferences import build_preference

        transition = np.asarray(state["transition"], dtype=np.float64)
        if transition.ndim != 3:
            raise DomainError(f"transition must have shape (S, A, S), got {transition.shape}")
        spec = PreferenceSpec.load(reward)
        state["reward"] = build_preference(spec, transition.shape[0], transition.shape[1], rng=rng)

    state.pop("num_states", None)
    state.pop("num_actions", None)
    return PreferenceGame.load(state)
