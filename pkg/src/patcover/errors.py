class PatcoverError(Exception):
    """Base class for all errors raised by this package."""


class InputError(PatcoverError, ValueError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ResourceError(PatcoverError):
    pass


class LayoutError(PatcoverError):
    pass
