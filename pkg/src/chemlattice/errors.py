"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Parameters, config files, or input specs failed validation."""


class CapacityError(ValueError):
    """An exact computation was requested beyond its tractable size bound."""


class CheckFailure(Exception):
    """A scenario ran to completion but failed its --check validation."""

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("; ".join(self.failures))
