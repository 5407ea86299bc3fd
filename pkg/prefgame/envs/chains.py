"""
Layered deterministic environments where the state is the prefix generated so far: a token
sequence, or a sequence of reasoning steps.
"""
import logging
from typing import Optional

import numpy as np

from prefgame.core.errors import ConfigurationError, DomainError
from prefgame.data.config import PreferenceSpec
from prefgame.data.game import PreferenceGame
from prefgame.envs.preferences import build_preference, mask_to_states

l = logging.getLogger(__name__)

DEFAULT_STATE_BUDGET = 512


def layer_offsets(horizon: int, branching: int) -> np.ndarray:
    """
    Index of the first state of every depth when prefixes are numbered breadth first,
    followed by the total number of states.
    """
    sizes = [branching ** k for k in range(horizon)]
    return np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)


def token_chain(horizon: int, num_tokens: int, preference: Optional[PreferenceSpec] = None, seed: int = 0,
                state_budget: int = DEFAULT_STATE_BUDGET, name="token-chain") -> PreferenceGame:
    """
    Every state at depth k < H - 1 is a prefix of k tokens, and emitting a token moves to the
    prefix extended by it. Depth H - 1 is never left within the horizon; its states loop on
    themselves to keep the transition stochastic.
    """
    if horizon < 1:
        raise DomainError(f"horizon must be positive, got {horizon}")
    if num_tokens < 2:
        raise DomainError(f"at least 2 tokens are needed, got {num_tokens}")

    offsets = layer_offsets(horizon, num_tokens)
    num_states = int(offsets[-1])
    if num_states > state_budget:
        raise ConfigurationError(
            "state_budget", f"{num_states} prefix states for H={horizon}, A={num_tokens} exceed the budget of {state_budget}"
        )

    transition = np.zeros((num_states, num_tokens, num_states))
    for depth in range(horizon):
        for local in range(num_tokens ** depth):
            s = offsets[depth] + local
            if depth == horizon - 1:
                transition[s, :, s] = 1.0
            else:
                children = offsets[depth + 1] + local * num_tokens + np.arange(num_tokens)
                transition[s, np.arange(num_tokens), children] = 1.0

    initial_dist = np.zeros(num_states)
    initial_dist[0] = 1.0

    preference = preference if preference is not None else PreferenceSpec()
    reward = build_preference(preference, num_states, num_tokens, rng=np.random.default_rng(seed))
    if preference.terminal_only:
        reward = mask_to_states(reward, range(offsets[horizon - 1], offsets[horizon]))

    return PreferenceGame(transition, initial_dist, reward, horizon, name=name)


def reasoning_chain(horizon: int, num_steps_choices: int, preference: Optional[PreferenceSpec] = None, seed: int = 0,
                    state_budget: int = DEFAULT_STATE_BUDGET) -> PreferenceGame:
    """
    Chain-of-thought environment: each stage appends one reasoning step out of
    num_steps_choices candidates. Only the final answer is usually judged, so callers
    typically pass a terminal_only preference.
    """
    return token_chain(
        horizon, num_steps_choices, preference=preference, seed=seed, state_budget=state_budget,
        name="reasoning-chain"
    )
