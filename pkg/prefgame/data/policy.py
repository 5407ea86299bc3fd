from typing import Sequence

import numpy as np

from prefgame.core.errors import DomainError
from prefgame.data.artifact import Artifact
from prefgame.data.game import PreferenceGame, renormalize


class Policy(Artifact):
    """
    A non-stationary stochastic policy: probs[h, s] is the distribution over actions played
    in state s at stage h (stages are 0-based).
    """

    __slots__ = (
        "probs",
    )

    ARRAY_FIELDS = {
        "probs": np.float64,
    }

    def __init__(self, probs):
        probs = np.asarray(probs, dtype=np.float64)
        if probs.ndim != 3:
            raise DomainError(f"policy must have shape (H, S, A), got {probs.shape}")
        self.probs = renormalize(probs, what="policy row")

    def __setstate__(self, state):
        super(Policy, self).__setstate__(state)
        self.__init__(self.probs)

    @property
    def horizon(self) -> int:
        return self.probs.shape[0]

    @property
    def num_states(self) -> int:
        return self.probs.shape[1]

    @property
    def num_actions(self) -> int:
        return self.probs.shape[2]

    @property
    def log_probs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.probs)

    def check_compatible(self, game: PreferenceGame):
        expected = (game.horizon, game.num_states, game.num_actions)
        if self.probs.shape != expected:
            raise DomainError(f"policy shape {self.probs.shape} does not match game shape {expected}")

    def total_variation(self, other: "Policy") -> float:
        """
        Largest total-variation distance between the two policies over all (stage, state).
        """
        return float(0.5 * np.abs(self.probs - other.probs).sum(axis=-1).max())

    #
    # Constructors
    #

    @classmethod
    def uniform(cls, game: PreferenceGame) -> "Policy":
        shape = (game.horizon, game.num_states, game.num_actions)
        return cls(np.full(shape, 1.0 / game.num_actions))

    @classmethod
    def random(cls, game: PreferenceGame, rng: np.random.Generator) -> "Policy":
        return cls(rng.dirichlet(np.ones(game.num_actions), size=(game.horizon, game.num_states)))

    @classmethod
    def pure(cls, game: PreferenceGame, actions) -> "Policy":
        """
        A deterministic policy. `actions` is either a single action played everywhere or an
        H x S array of actions.
        """
        actions = np.broadcast_to(np.asarray(actions, dtype=np.int64), (game.horizon, game.num_states))
        probs = np.zeros((game.horizon, game.num_states, game.num_actions))
        np.put_along_axis(probs, actions[..., None], 1.0, axis=-1)
        return cls(probs)


class OccupancyMeasure(Artifact):
    """
    Occupancy measures of one policy, conditioned on each initial state:
    d[i, h, s, a] = Pr(S_h = s, A_h = a | S_1 = initial_states[i]).
    """

    __slots__ = (
        "initial_states",
        "d",
    )

    ARRAY_FIELDS = {
        "initial_states": np.int64,
        "d": np.float64,
    }

    def __init__(self, initial_states: Sequence[int], d):
        self.initial_states = np.asarray(initial_states, dtype=np.int64)
        self.d = np.asarray(d, dtype=np.float64)
        if self.d.ndim != 4 or self.d.shape[0] != len(self.initial_states):
            raise DomainError(
                f"occupancy must have shape (I, H, S, A) with I={len(self.initial_states)}, got {self.d.shape}"
            )
        if np.any(self.d < 0):
            raise DomainError("occupancy measures are nonnegative")

    def for_initial(self, s1: int) -> np.ndarray:
        matches = np.flatnonzero(self.initial_states == s1)
        if len(matches) == 0:
            raise DomainError(f"no occupancy recorded for initial state {s1}")
        return self.d[matches[0]]

    @property
    def horizon(self) -> int:
        return self.d.shape[1]

    def state_marginal(self) -> np.ndarray:
        """
        d[i, h, s] summed over actions.
        """
        return self.d.sum(axis=-1)


class PairwiseValues(Artifact):
    """
    Pair-wise value functions of a policy pair: Q[h, s, a, s', a'] and V[h, s, s'] with the
    terminal V[H] = 0 included.
    """

    __slots__ = (
        "Q",
        "V",
    )

    ARRAY_FIELDS = {
        "Q": np.float64,
        "V": np.float64,
    }

    def __init__(self, Q, V):
        self.Q = Q
        self.V = V

    @property
    def horizon(self) -> int:
        return self.Q.shape[0]

    def marginal_q(self, d_opponent: np.ndarray) -> np.ndarray:
        """
        E_{S',A' ~ d_h} Q_h(s, a, S', A') for a per-stage opponent occupancy d_opponent[h, s', a'].
        """
        return np.einsum("hsabc,hbc->hsa", self.Q, d_opponent)
