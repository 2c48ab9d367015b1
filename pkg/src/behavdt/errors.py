class BehavDTError(Exception):
    """Base class for all package errors."""


class DataError(BehavDTError, ValueError):
    """Invalid or malformed input data (CSV rows, configs, specs)."""


class ModelFormatError(BehavDTError, ValueError):
    """A serialized model document cannot be read."""

    def __init__(self, message: str, location: str | None = None) -> None:
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class VersionError(ModelFormatError):
    """Model document carries an unsupported format version."""
