import logging.config
import os
import tempfile
from datetime import datetime

LOG_FORMAT = "%(levelname)s | %(asctime)s | %(name)-8s | %(message)s"
ROOT_LOGGER = "prefgame"


def default_log_file() -> str:
    # the file is only created once a record is emitted
    stamp = datetime.now().strftime("%Y%m%d-%H%M%S")
    return os.path.join(tempfile.gettempdir(), f"{stamp}.{ROOT_LOGGER}.log")


def build_config(level="INFO", log_file=None) -> dict:
    """
    dictConfig for the prefgame logger tree. The console handler writes to stderr so the
    structured output of the cli owns stdout.

    @param level:       level of the prefgame logger
    @param log_file:    rotating debug log, defaults to a timestamped file in the temp dir
    """
    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "plain": {"format": LOG_FORMAT},
        },
        "handlers": {
            "console": {
                "class": "logging.StreamHandler",
                "level": "DEBUG",
                "formatter": "plain",
                "stream": "ext://sys.stderr",
            },
            "debug_file": {
                "class": "logging.handlers.RotatingFileHandler",
                "level": "DEBUG",
                "formatter": "plain",
                "filename": log_file or default_log_file(),
                "maxBytes": 1000000,
                "backupCount": 5,
                "encoding": "utf8",
                "delay": True,
            },
        },
        "loggers": {
            ROOT_LOGGER: {
                "handlers": ["console", "debug_file"],
                "level": level,
                "propagate": False,
            },
        },
    }


class Loggers:
    """
    Logger Manager. Submodule loggers are reachable as attributes, e.g. loggers.prefgame_solvers_runner.

    PREFGAME_LOG_LEVEL overrides the initial level.
    """

    def __init__(self, level=None):
        self._loggers = {}
        level = level or os.environ.get("PREFGAME_LOG_LEVEL", "INFO").upper()
        logging.config.dictConfig(build_config(level=level))
        # filelock logs every acquire at DEBUG
        logging.getLogger("filelock").setLevel(logging.WARNING)
        self._refresh()

    def _refresh(self):
        for name, logger in logging.Logger.manager.loggerDict.items():
            if name == ROOT_LOGGER or name.startswith(ROOT_LOGGER + "."):
                self._loggers[name] = logger

    def set_level(self, level):
        logging.getLogger(ROOT_LOGGER).setLevel(level)

    def __getattr__(self, k):
        real_k = k.replace("_", ".")
        if real_k not in self._loggers:
            self._refresh()
        try:
            return self._loggers[real_k]
        except KeyError:
            raise AttributeError(k)

    def __dir__(self):
        return list(super(Loggers, self).__dir__()) + list(self._loggers.keys())
