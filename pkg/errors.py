#
#  errors.py
#


class EpgapError(Exception):
    """Base class for everything the toolkit raises on purpose.

    `clause` is a short machine-readable tag (the CLI puts it in its JSON error output).
    """

    def __init__(self, message: str, clause: str = ""):
        super().__init__(message)
        self.clause = clause


class ParameterError(EpgapError):
    pass


class DomainError(ParameterError):
    pass


class MissingEdgeError(EpgapError):
    pass


class SizeLimitError(EpgapError):
    def __init__(self, key: str, size: int, limit: int, what: str = ""):
        what = what or key
        super().__init__(f"{what}: size {size} exceeds the configured limit {limit} ({key})", clause=key)
        self.key = key
        self.size = size
        self.limit = limit


class PreconditionError(EpgapError):
    pass


class WitnessInvalidError(EpgapError):
    pass


class ValidationError(EpgapError):
    pass


class Graph6ParseError(EpgapError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})", clause="graph6")
        self.offset = offset


class InvariantError(EpgapError):
    """A computation broke one of its own invariants; `clause` names which."""
    pass
