class BaseError(Exception):
    pass


class DomainError(BaseError):
    """
    Raised when an operation receives inputs outside of its domain: mismatched shapes,
    unknown initial states, distributions that are not stochastic, empty histories, ...
    """
    pass


class ConfigurationError(BaseError):
    def __init__(self, key, message):
        super(ConfigurationError, self).__init__(f"{key}: {message}")
        self.key = key
        self.message = message


class NumericalError(BaseError):
    pass


class GameFileError(BaseError):
    pass
