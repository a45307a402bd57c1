"""Exception hierarchy. Each family maps to one CLI exit code."""


class StarCLTError(Exception):
    exit_code = 1


class GraphParseError(StarCLTError, ValueError):
    """Raised when a rooted-graph file is malformed."""

    exit_code = 3

    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class MalformedLineError(GraphParseError):
    pass


class SelfLoopError(GraphParseError):
    pass


class RootOutOfRangeError(GraphParseError):
    pass


class VertexOutOfRangeError(GraphParseError):
    pass


class PreconditionError(StarCLTError, ValueError):
    exit_code = 4


class NotAMomentSequenceError(PreconditionError):
    """Hankel form of the moments is indefinite beyond tolerance."""


class SizeCapError(StarCLTError, ValueError):
    exit_code = 5
