"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
failures to distinct process exit statuses without a lookup table.
"""


class NoRegretError(Exception):
    exit_code = 1


class ConfigError(NoRegretError, ValueError):
    """Invalid run configuration or argument."""

    exit_code = 2


class SchemaError(ConfigError):
    """Unknown attribute, id or label, or an inconsistent schema."""


class ParameterError(ConfigError):
    """Parameter point of the wrong dimension or outside its domain."""


class IngestionError(NoRegretError, ValueError):
    exit_code = 3


class InfeasibleError(NoRegretError):
    """No selection satisfies the hard fairness predicate."""

    exit_code = 4


class SingularHessian(NoRegretError, ArithmeticError):
    """The solution-space Hessian is singular or numerically near-singular."""

    exit_code = 5


class ComplexityError(NoRegretError):
    exit_code = 6

    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count


class ConsistencyError(NoRegretError, ValueError):
    """A completion value lies outside its interval."""

    exit_code = 2
