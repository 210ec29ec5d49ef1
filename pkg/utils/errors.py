"""
Exception hierarchy shared by every layer.
Verification failures carry the index or check name that broke.
"""
from typing import Optional


class AltProjError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(AltProjError, ValueError):
    pass


class DomainError(AltProjError, ValueError):
    """Argument outside the documented domain (negative angle, bad range)."""


class EmptyCloud(AltProjError, ValueError):
    pass


class DegenerateProjection(AltProjError):
    """The minimizer set is uncountable (sphere queried at its center)."""

    def __init__(self, message: str, iteration: Optional[int] = None):
        self.iteration = iteration
        if iteration is not None:
            message = f"{message} (iteration {iteration})"
        super().__init__(message)


class AmbiguousProjection(AltProjError):
    def __init__(self, iteration: int, which: str, n_candidates: int):
        self.iteration = iteration
        self.which = which
        self.n_candidates = n_candidates
        super().__init__(
            f"projection onto set {which} at iteration {iteration} "
            f"has {n_candidates} candidates and tie_policy is 'error'"
        )


class BracketInvalid(AltProjError):
    pass


class NearestPropertyViolated(AltProjError):
    def __init__(self, n: int, found: int):
        self.n = n
        self.found = found
        super().__init__(f"nearest neighbour of x_{n} is x_{found}, expected x_{n + 1}")


class CorollaryViolated(AltProjError):
    def __init__(self, n: int, detail: str):
        self.n = n
        super().__init__(f"alternating projections left the spiral at pair {n}: {detail}")


class SequenceCheckFailed(AltProjError):
    def __init__(self, check: str, detail: str):
        self.check = check
        self.detail = detail
        super().__init__(f"{check}: {detail}")


class TruncationEdge(AltProjError, ValueError):
    pass
