"""Exception hierarchy.

Input problems (bad graphs, bad restart models, unparsable files) derive from
:class:`InputError`; numerical preconditions and convergence failures derive
from :class:`SolverError`. The CLI maps the two families to distinct exit codes.
"""


class RestartRankError(Exception):
    """Base class for all package errors."""


class InputError(RestartRankError, ValueError):
    pass


class SolverError(RestartRankError, ArithmeticError):
    pass


# graph construction

class EmptyGraph(InputError):
    pass


class NegativeWeight(InputError):
    pass


class SingleNodeDangling(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class GraphParseError(InputError):
    pass


# restart models

class AlphaOutOfRange(InputError):
    pass


class BadDistribution(InputError):
    pass


class StabilityViolation(InputError):
    pass


class NonpositiveJumpWeight(InputError):
    pass


class ConfigError(InputError):
    pass


# identity checks

class NotUndirected(InputError):
    pass


class AlphaBoundary(InputError):
    pass


# solvers

class SolverPreconditionAlphaOne(SolverError):
    pass


class NoConvergence(SolverError):
    pass


class DenseOnly(SolverError):
    pass


class OracleSizeExceeded(SolverError):
    pass


class NonUniqueStationary(SolverError):
    pass


class NoRestartsObserved(SolverError):
    pass
