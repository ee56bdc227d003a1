"""Exception types shared across the package."""


class LabError(Exception):
    """Base class; the CLI maps these to a nonzero operational exit."""


class NotHermitian(LabError):
    pass


class DimensionMismatch(LabError):
    pass


class BadSubsystem(LabError):
    pass


class InvalidCoefficients(LabError):
    pass


class OutOfRange(LabError):
    pass


class NonPositiveEnergy(LabError):
    pass


class OffShell(LabError):
    pass


class NotRotation(LabError):
    pass


class UnknownConvention(LabError):
    pass


class NoConvergence(LabError):
    pass


class FixtureCorrupt(LabError):
    pass
