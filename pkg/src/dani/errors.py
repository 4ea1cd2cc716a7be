"""Exception types shared across the package."""


class DaniError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(DaniError):
    """A corpus file line could not be parsed."""

    def __init__(self, message, line_no=None, path=None):
        self.line_no = line_no
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line_no is not None:
            where += f"{line_no}: "
        super().__init__(f"{where}{message}")


class FetchError(DaniError):
    """Dataset download failed."""


class IntegrityError(DaniError):
    """Downloaded dataset failed a checksum comparison."""


class DecodeError(DaniError):
    """A statement or question did not match any known template.

    Scored as a wrong answer by the harness; never aborts a run.
    """

    def __init__(self, tokens, reason="no template matched"):
        self.tokens = tuple(tokens)
        super().__init__(f"{reason}: {' '.join(tokens)}")


class UnresolvedError(DaniError):
    """The story graph holds no event that answers the query."""


class NoPathError(DaniError):
    """Two vertices are not connected by relation edges."""


class FrozenError(DaniError):
    """Attempted mutation of a frozen attribute model."""


class UnknownAttributeError(DaniError):
    """Attribute token is not a vertex of the model."""


class TrainDataError(DaniError):
    """Training data violates an assumption the trainer depends on."""


class ConfigError(DaniError):
    """Invalid run configuration."""


class FormatError(DaniError):
    """A model file is malformed or has an unsupported version."""


class IoError(DaniError):
    """Filesystem access failed."""
