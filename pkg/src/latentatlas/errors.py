"""Exception types shared across the package."""


class LatentAtlasError(Exception):
    """Base class for all package errors."""


class ParseError(LatentAtlasError):
    """A file could not be parsed; message names the offending row/column."""


class ParameterError(LatentAtlasError):
    """An argument violates an operation's precondition."""


class InsufficientNeighborhoodError(LatentAtlasError):
    """A local neighborhood has too few members for a spectrum."""

    def __init__(self, member_count: int, message: str | None = None):
        self.member_count = member_count
        super().__init__(message or f"neighborhood has {member_count} member(s), need at least 2")


class EmptyScaleError(LatentAtlasError):
    """Every sampled center was skipped at one scale."""

    def __init__(self, radius: float):
        self.radius = radius
        super().__init__(f"no center has a usable neighborhood at radius {radius!r}")


class DegenerateEstimateError(LatentAtlasError):
    """The slope test found zero signal dimensions."""

    def __init__(self, message: str | None = None):
        super().__init__(
            message
            or "no signal dimensions detected; try a larger r_max or a lower epsilon"
        )


class InputError(LatentAtlasError):
    """Externally supplied evaluation input is inconsistent with the cloud."""
