"""Exception hierarchy shared by all modules.

Each class carries an ``exit_code`` used by the command-line front end.
"""


class LatdiscError(Exception):
    exit_code = 3


class InvalidParameter(LatdiscError, ValueError):
    pass


class EmptyChord(LatdiscError, ValueError):
    pass


class UnsupportedBody(LatdiscError, TypeError):
    pass


class FlatDirection(LatdiscError, ValueError):
    pass


class DegenerateFit(LatdiscError, ValueError):
    pass


class ResolutionError(LatdiscError, ValueError):
    pass


class AmbiguousTarget(LatdiscError, ValueError):
    pass


class ConstructionError(LatdiscError, RuntimeError):
    pass


class BudgetError(LatdiscError, RuntimeError):
    exit_code = 4

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class ConfigError(LatdiscError, ValueError):
    exit_code = 2
