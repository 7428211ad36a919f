from typing import List


class PcogError(Exception):
    """Base class for every error raised by the pcog package."""


class InputError(PcogError):
    """A precondition of an operation was violated by its arguments."""


class GraphError(InputError):
    """A graph could not be built or queried as requested."""


class SizeLimitError(InputError):
    """An enumeration or brute-force cap from pcog.settings was exceeded."""


class InvalidInstanceError(InputError):
    """
    Raised when an operation receives an instance that fails validate().

    Parameters:
    - violations: the rules broken, as returned by game.validate
    """

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__("invalid instance: " + "; ".join(self.violations))


class UnsupportedError(PcogError):
    """The operation is not defined for this goal or ownership shape."""


class InfeasibleError(PcogError):
    """The underlying optimization problem has no feasible solution."""


class LpError(InputError):
    """A linear program is malformed."""


class FormatError(PcogError):
    """An input file or text could not be parsed."""


class CnfParseError(FormatError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")
