VERSION = "0.3.0"

import logging

logging.getLogger("prefgame").addHandler(logging.NullHandler())
from prefgame.loggercfg import Loggers

loggers = Loggers()
del Loggers
del logging

from prefgame.data import *
from prefgame.core.errors import BaseError, DomainError, ConfigurationError, NumericalError, GameFileError
from prefgame.core.storage import load_game, save_game
from prefgame.core.validation import validate_game
from prefgame.solvers import run_solver
