from prefgame.core.errors import BaseError, DomainError, ConfigurationError, NumericalError, GameFileError
from prefgame.core.scheduler import Scheduler, Job, FailedJob
