import inspect
import logging
from typing import Dict

from prefgame.core.errors import BaseError, ConfigurationError
from prefgame.data.config import GridworldSpec, PreferenceSpec
from prefgame.data.game import PreferenceGame

from .preferences import (
    preference_from_scores, cyclic_preference, random_antisymmetric, tie_preference, dominant_preference,
    preference_from_voters, find_preference_cycle, build_preference, VOTER_EXAMPLE
)
from .gridworld import random_gridworld
from .chains import token_chain, reasoning_chain
from .conversation import conversation_game
from .matrix import matrix_game, rps, dom2, cyclic_game, tie_game, weighted_rps, weighted_rps_equilibrium

l = logging.getLogger(__name__)


def _gridworld(seed=0, **params):
    state = dict(params)
    state["seed"] = seed
    return random_gridworld(GridworldSpec.load(state))


GENERATORS = {
    "gridworld": _gridworld,
    "token_chain": token_chain,
    "reasoning_chain": reasoning_chain,
    "conversation": conversation_game,
    "rps": rps,
    "dom2": dom2,
    "cyclic": cyclic_game,
    "tie": tie_game,
    "weighted_rps": weighted_rps,
}

_GRIDWORLD_KEYS = set(GridworldSpec.fields()) - {"seed"}


def _accepted_keys(name):
    if name == "gridworld":
        return _GRIDWORLD_KEYS | {"seed"}
    return set(inspect.signature(GENERATORS[name]).parameters)


def generate(name: str, seed: int = 0, prefix="environment", **params) -> PreferenceGame:
    """
    Builds a game with one of the named GENERATORS. Generators without randomness ignore the seed.

    @raises ConfigurationError: unknown generator or parameter
    """
    if name not in GENERATORS:
        raise ConfigurationError(f"{prefix}.generator", f"unknown generator {name!r}, expected one of {', '.join(GENERATORS)}")

    accepted = _accepted_keys(name)
    for key in params:
        if key not in accepted:
            raise ConfigurationError(f"{prefix}.{key}", f"not a parameter of the {name} generator")

    params = dict(params)
    if isinstance(params.get("preference", None), dict):
        try:
            params["preference"] = PreferenceSpec.load(params["preference"])
        except ConfigurationError as e:
            raise ConfigurationError(f"{prefix}.{e.key}", e.message)
    if "seed" in accepted:
        params["seed"] = seed

    try:
        return GENERATORS[name](**params)
    except ConfigurationError as e:
        if e.key.startswith(prefix):
            raise
        raise ConfigurationError(f"{prefix}.{e.key}", e.message)


def build_environment(environment: Dict, seed: int) -> PreferenceGame:
    """
    Builds the game of an experiment config's environment table for one environment seed.
    Game files are loaded as they are, whatever the seed.
    """
    if "path" in environment:
        from prefgame.core.storage import load_game
        return load_game(environment["path"])

    params = dict(environment)
    name = params.pop("generator")
    return generate(name, seed=seed, **params)
