import logging
import math

import numpy as np

from prefgame.core.errors import DomainError
from prefgame.data.config import GridworldSpec
from prefgame.data.game import PreferenceGame
from prefgame.envs.preferences import build_preference

l = logging.getLogger(__name__)


def sparse_transitions(num_states: int, num_actions: int, sparsity: float, rng: np.random.Generator) -> np.ndarray:
    """
    Dirichlet(1, ..., 1) successor distributions truncated to their ceil(sparsity * S) largest
    entries and renormalized.
    """
    keep = max(1, int(math.ceil(sparsity * num_states)))
    probs = rng.dirichlet(np.ones(num_states), size=(num_states, num_actions))
    if keep < num_states:
        order = np.argsort(-probs, axis=-1, kind="stable")
        dropped = order[..., keep:]
        np.put_along_axis(probs, dropped, 0.0, axis=-1)
    return probs / probs.sum(axis=-1, keepdims=True)


def random_gridworld(spec: GridworldSpec) -> PreferenceGame:
    """
    A random tabular environment: |S| and |A| are drawn uniformly from the GridworldSpec's closed
    ranges, the game always starts in state 0. Deterministic in spec.seed.
    """
    (s_lo, s_hi), (a_lo, a_hi) = spec.state_range, spec.action_range
    if s_lo > s_hi or s_lo < 1:
        raise DomainError(f"empty state range {list(spec.state_range)}")
    if a_lo > a_hi or a_lo < 1:
        raise DomainError(f"empty action range {list(spec.action_range)}")

    rng = np.random.default_rng(spec.seed)
    num_states = int(rng.integers(s_lo, s_hi + 1))
    num_actions = int(rng.integers(a_lo, a_hi + 1))
    transition = sparse_transitions(num_states, num_actions, spec.transition_sparsity, rng)

    initial_dist = np.zeros(num_states)
    initial_dist[0] = 1.0
    reward = build_preference(spec.preference, num_states, num_actions, rng=rng)

    game = PreferenceGame(transition, initial_dist, reward, spec.horizon, name=f"gridworld-{spec.seed}")
    l.debug("generated %s", game.summary())
    return game
