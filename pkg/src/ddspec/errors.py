"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates the documented preconditions."""


class DomainError(ValueError):
    """A quantity is mathematically undefined for the given inputs."""


class BracketError(ValueError):
    """A root-finding bracket does not straddle the target."""


class DegenerateFitError(RuntimeError):
    """The normal matrix of a least-squares problem is singular."""


class DataValidationError(ValueError):
    """An input file failed parsing or validation.

    ``row`` is 1-based and counts the header line as row 1, so it matches
    what an editor shows. ``column`` is the header name, when known.
    """

    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column!r}")
        super().__init__(f"{', '.join(loc)}: {message}" if loc else message)
        self.row = row
        self.column = column
