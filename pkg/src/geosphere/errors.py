"""Exception types raised across the package."""


class GeosphereError(Exception):
    """Base class for all package errors."""


class CapacityError(GeosphereError, ValueError):
    """Requested structure exceeds the configured size guard."""


class DomainError(GeosphereError, ValueError):
    """Input lies outside the mathematical domain of an operation."""


class DimensionError(GeosphereError, ValueError):
    """Array shapes or channel counts do not agree."""


class MeshError(GeosphereError, RuntimeError):
    """Mesh is internally inconsistent (should never happen for built spheres)."""


class FormatError(GeosphereError):
    """A binary or text file does not follow its format."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset
