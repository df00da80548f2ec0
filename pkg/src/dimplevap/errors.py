class PhysicsError(Exception):
    """Base class for failures of the physical model or its numerics."""


class NoBoundMinimum(PhysicsError):
    pass


class DivergentIntegral(PhysicsError):
    pass


class NoRoot(PhysicsError):
    pass


class InvalidRegime(PhysicsError):
    pass


class InvalidEta(PhysicsError):
    pass


class StepFailure(PhysicsError):
    pass


class NonPhysical(PhysicsError):
    pass


class ConfigError(ValueError):
    pass


class UnknownFigure(KeyError):
    pass
