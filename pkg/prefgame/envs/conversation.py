import logging
from typing import Optional

import numpy as np

from prefgame.core.errors import DomainError
from prefgame.data.config import PreferenceSpec
from prefgame.data.game import PreferenceGame
from prefgame.envs.preferences import build_preference, mask_to_states

l = logging.getLogger(__name__)


def conversation_game(horizon: int, num_answers: int, prompts_per_turn: int = 3, seed: int = 0,
                      preference: Optional[PreferenceSpec] = None) -> PreferenceGame:
    """
    Multi-turn conversation: turn 0 is a single opening prompt, every later turn has
    prompts_per_turn possible user prompts. Answering a prompt leads to a random distribution
    over the prompts of the next turn.

    States are numbered 0 for the opening prompt and 1 + (k - 1) * P + i for prompt i of turn k.
    """
    if horizon < 1:
        raise DomainError(f"horizon must be positive, got {horizon}")
    if num_answers < 1 or prompts_per_turn < 1:
        raise DomainError("a conversation needs at least one answer and one prompt per turn")

    rng = np.random.default_rng(seed)
    P = prompts_per_turn
    num_states = 1 + (horizon - 1) * P

    def turn_states(k):
        return [0] if k == 0 else list(range(1 + (k - 1) * P, 1 + k * P))

    transition = np.zeros((num_states, num_answers, num_states))
    for k in range(horizon):
        for s in turn_states(k):
            if k == horizon - 1:
                transition[s, :, s] = 1.0
            else:
                transition[s][:, turn_states(k + 1)] = rng.dirichlet(np.ones(P), size=num_answers)

    initial_dist = np.zeros(num_states)
    initial_dist[0] = 1.0

    preference = preference if preference is not None else PreferenceSpec()
    reward = build_preference(preference, num_states, num_answers, rng=rng)
    if preference.terminal_only:
        reward = mask_to_states(reward, turn_states(horizon - 1))

    return PreferenceGame(transition, initial_dist, reward, horizon, name=f"conversation-{seed}")
