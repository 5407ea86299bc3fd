import json
import logging
import pathlib
from typing import Dict, Union

import toml

from prefgame.core.errors import BaseError, GameFileError
from prefgame.data.game import PreferenceGame, load_game_state

l = logging.getLogger(__name__)


def load_structured_file(path: Union[str, pathlib.Path]) -> Dict:
    """
    Reads a TOML file, or a JSON file when the suffix is .json.
    """
    path = pathlib.Path(path)
    try:
        with open(path, "r") as fp:
            data = fp.read()
    except OSError as e:
        raise GameFileError(f"unable to read {path}: {e}")

    try:
        if path.suffix.lower() == ".json":
            return json.loads(data)
        return toml.loads(data)
    except (ValueError, TypeError, IndexError) as e:
        # toml raises TomlDecodeError (a ValueError) and occasionally IndexError on broken arrays
        raise GameFileError(f"unable to parse {path}: {e}")


def dump_structured_file(path: Union[str, pathlib.Path], text_toml: str, text_json: str):
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fp:
        fp.write(text_json if path.suffix.lower() == ".json" else text_toml)


def load_game(path: Union[str, pathlib.Path]) -> PreferenceGame:
    state = load_structured_file(path)
    try:
        game = load_game_state(state)
    except BaseError as e:
        raise GameFileError(f"{path}: {e}")
    except (KeyError, ValueError, TypeError) as e:
        raise GameFileError(f"{path}: malformed game ({e})")

    if game.name is None:
        game.name = pathlib.Path(path).stem
    l.debug("loaded %s from %s", game.summary(), path)
    return game


def save_game(game: PreferenceGame, path: Union[str, pathlib.Path]):
    dump_structured_file(path, game.dump(), game.dump_json())
    l.debug("saved %s to %s", game.summary(), path)
