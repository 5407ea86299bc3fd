import logging
from threading import Lock
from typing import Callable, Dict

from prefgame.data.game import PreferenceGame

l = logging.getLogger(__name__)


class GameCache:
    """
    Shares one generated game between all solver jobs of an environment seed. Games are
    built at most once per seed, even when several workers ask for the same seed at once.
    """

    def __init__(self, builder: Callable[[int], PreferenceGame]):
        self.builder = builder
        self._games: Dict[int, PreferenceGame] = {}
        self._seed_locks: Dict[int, Lock] = {}
        self.games_lock = Lock()

    def _lock_for(self, seed) -> Lock:
        with self.games_lock:
            if seed not in self._seed_locks:
                self._seed_locks[seed] = Lock()
            return self._seed_locks[seed]

    #
    # getters
    #

    def get_game(self, seed: int) -> PreferenceGame:
        with self._lock_for(seed):
            game = self._games.get(seed, None)
            if game is None:
                game = self.builder(seed)
                l.debug("built %s for seed %d", game.summary(), seed)
                self._games[seed] = game
            return game
