"""Exception types shared across the package."""


class EvaugError(Exception):
    """Base class for all evaug errors."""


class ConfigurationError(EvaugError, ValueError):
    """Invalid configuration value or inconsistent operation parameters."""


class FormatError(EvaugError):
    """File container mismatch: bad magic, unsupported version, bad header."""


class ParseError(EvaugError):
    """Malformed record in an input file.

    ``offset`` is the byte offset of the offending record (line start for
    text formats).
    """

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset
