"""Error hierarchy shared by every module.

Each class carries the process exit code the CLI maps it to.
"""

from __future__ import annotations


class RateboundError(Exception):
    kind = "error"
    exit_code = 1


class ArgumentError(RateboundError, ValueError):
    kind = "argument"
    exit_code = 2


class PreconditionError(ArgumentError):
    kind = "precondition"


class SpecificationError(ArgumentError):
    kind = "specification"


class ResourceError(RateboundError):
    kind = "resource"
    exit_code = 3


class StateError(RateboundError):
    kind = "state"
    exit_code = 2


class InvariantError(RateboundError):
    kind = "invariant"
    exit_code = 4
