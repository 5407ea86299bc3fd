"""
Preference oracles. Every builder returns a reward tensor r[s, a, s', a'] = P([s, a] > [s', a'])
that is antisymmetric: r[s, a, s', a'] + r[s', a', s, a] = 1.
"""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from prefgame.core.errors import DomainError
from prefgame.data.config import PreferenceKind, PreferenceSpec

l = logging.getLogger(__name__)

VOTER_EXAMPLE = ((2, 0, 1), (1, 2, 0), (0, 1, 2))


def preference_from_scores(scores) -> np.ndarray:
    """
    Bradley-Terry preferences r(s, a, s', a') = sigmoid(u(s, a) - u(s', a')).

    @param scores:  u as an S x A array
    """
    u = np.asarray(scores, dtype=np.float64)
    if u.ndim != 2:
        raise DomainError(f"scores must have shape (S, A), got {u.shape}")
    if not np.all(np.isfinite(u)):
        raise DomainError("scores must be finite")
    return expit(u[:, :, None, None] - u[None, None, :, :])


def cyclic_preference(n: int, p: float = 2.0 / 3.0) -> np.ndarray:
    """
    Non-transitive single-state preference over n actions arranged on a circle: action i beats
    the actions less than half way round after it, action i + 1 (mod n) included, with
    probability p. For even n the opposite pair is won by the action in the first half.

    @return: 1 x n x 1 x n tensor
    """
    if n < 3:
        raise DomainError(f"a preference cycle needs at least 3 actions, got {n}")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")

    m = np.full((n, n), 0.5)
    for i in range(n):
        for j in range(n):
            k = (j - i) % n
            if 0 < 2 * k < n or (2 * k == n and i < n // 2):
                m[i, j] = p
                m[j, i] = 1.0 - p
    return m[None, :, None, :]


def random_antisymmetric(num_states: int, num_actions: int, rng: np.random.Generator) -> np.ndarray:
    """
    Draws r = x ~ U(0, 1) for every ordered pair of distinct (s, a) and mirrors 1 - x, with
    0.5 on the diagonal.
    """
    n = num_states * num_actions
    upper = np.triu(rng.uniform(0.0, 1.0, size=(n, n)), k=1)
    m = upper + np.tril(1.0 - upper.T, k=-1)
    np.fill_diagonal(m, 0.5)
    return m.reshape(num_states, num_actions, num_states, num_actions)


def tie_preference(num_states: int, num_actions: int) -> np.ndarray:
    return np.full((num_states, num_actions, num_states, num_actions), 0.5)


def dominant_preference() -> np.ndarray:
    """
    Two actions where the first one dominates.
    """
    return np.array([[0.5, 0.8], [0.2, 0.5]])[None, :, None, :]


def preference_from_voters(orderings: Sequence[Sequence[int]]) -> np.ndarray:
    """
    The average of several transitive preferences. Each voter ranks all actions, best first,
    and prefers a over a' with probability 1 when a is ranked higher.

    @return: 1 x n x 1 x n tensor
    """
    if len(orderings) == 0:
        raise DomainError("at least one voter is needed")
    n = len(orderings[0])
    m = np.zeros((n, n))
    for ordering in orderings:
        if sorted(ordering) != list(range(n)):
            raise DomainError(f"voter ordering {list(ordering)} is not a permutation of {n} actions")
        rank = np.empty(n, dtype=np.int64)
        rank[list(ordering)] = np.arange(n)
        m += (rank[:, None] < rank[None, :]).astype(np.float64)
    m /= len(orderings)
    np.fill_diagonal(m, 0.5)
    return m[None, :, None, :]


def find_preference_cycle(reward: np.ndarray, tol=0.0) -> Optional[Tuple[int, int, int]]:
    """
    Looks for three (state, action) pairs i, j, k, as indices of the flattened S*A axis, with
    i > j, j > k and k > i. Such a cycle proves that no score vector reproduces the preference.
    """
    reward = np.asarray(reward)
    n = int(np.sqrt(reward.size))
    m = reward.reshape(n, n)
    wins = m > 0.5 + tol
    for i, j in zip(*np.nonzero(wins)):
        ks = np.flatnonzero(wins[j] & wins[:, i])
        if len(ks):
            return int(i), int(j), int(ks[0])
    return None


def tile_states(matrix_reward: np.ndarray, num_states: int) -> np.ndarray:
    """
    Extends a single-state 1 x A x 1 x A preference to every pair of states.
    """
    m = matrix_reward.reshape(matrix_reward.shape[1], matrix_reward.shape[3])
    return np.broadcast_to(m[None, :, None, :], (num_states, m.shape[0], num_states, m.shape[1])).copy()


def mask_to_states(reward: np.ndarray, states: Sequence[int]) -> np.ndarray:
    """
    Keeps the preference only when both players are in one of `states`, ties elsewhere.
    The mask is symmetric in the two players so antisymmetry survives.
    """
    keep = np.zeros(reward.shape[0], dtype=bool)
    keep[list(states)] = True
    both = keep[:, None, None, None] & keep[None, None, :, None]
    return np.where(both, reward, 0.5)


def build_preference(spec: PreferenceSpec, num_states: int, num_actions: int,
                     rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    Builds the reward tensor a PreferenceSpec describes. A seed set on the PreferenceSpec wins over `rng`.
    Masking for terminal_only is left to the layered generators, which know their last layer.
    """
    if spec.seed is not None:
        rng = np.random.default_rng(spec.seed)
    elif rng is None:
        rng = np.random.default_rng(0)

    kind = spec.kind
    if kind == PreferenceKind.SCORE_SIGMOID:
        if spec.scores is None:
            scores = rng.normal(0.0, spec.scale, size=(num_states, num_actions))
        else:
            scores = np.asarray(spec.scores, dtype=np.float64)
            try:
                scores = np.broadcast_to(scores, (num_states, num_actions))
            except ValueError:
                raise DomainError(f"scores of shape {scores.shape} do not fit {num_states} states and {num_actions} actions")
        return preference_from_scores(scores)
    if kind == PreferenceKind.CYCLIC:
        return tile_states(cyclic_preference(num_actions, spec.p), num_states)
    if kind == PreferenceKind.RANDOM_ANTISYMMETRIC:
        return random_antisymmetric(num_states, num_actions, rng)
    if kind == PreferenceKind.TIE:
        return tie_preference(num_states, num_actions)
    if kind == PreferenceKind.VOTERS:
        reward = preference_from_voters(spec.orderings)
        if reward.shape[1] != num_actions:
            raise DomainError(f"voters rank {reward.shape[1]} actions but the game has {num_actions}")
        return tile_states(reward, num_states)
    raise DomainError(f"unknown preference kind {kind}")

