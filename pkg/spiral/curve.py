"""
The spiral x(alpha) = rho(alpha) * (cos alpha, sin alpha) with rho(t) = 1 + exp(-t),
its step length eps(t), and the solver for the unique forward point at distance
eps(alpha) along the curve.

Angles are radians throughout; degrees appear only in to_degrees().
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import bisect

from utils.config import get_settings
from utils.errors import BracketInvalid, DomainError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi
EPS_SCALE = -math.expm1(-TWO_PI) / 2.0  # (1 - e^{-2pi}) / 2
MAX_STEP = math.radians(40.0)
# Offsets of the step bracket solved from rho(alpha) - eps <= rho(beta) <= rho(alpha) + eps.
BRACKET_LOW_OFFSET = math.log(2.0) - math.log(3.0 - math.exp(-TWO_PI))  # ~ -0.40
BRACKET_HIGH_OFFSET = math.log(2.0) - math.log1p(math.exp(-TWO_PI))  # ~ +0.69


@dataclass(frozen=True)
class StepBracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi):
            raise DomainError(f"bracket needs 0 <= lo < hi, got [{self.lo}, {self.hi}]")
        if self.hi - self.lo > HALF_PI:
            raise DomainError("bracket wider than pi/2")


def _check_angle(t: float, name: str = "t") -> float:
    if not math.isfinite(t) or t < 0.0:
        raise DomainError(f"{name} must be a finite nonnegative angle, got {t!r}")
    return float(t)


def rho(t: float) -> float:
    _check_angle(t)
    return 1.0 + math.exp(-t)


def eps(t: float) -> float:
    """(rho(t) - rho(t + 2pi)) / 2, evaluated as ((1 - e^{-2pi}) / 2) e^{-t}."""
    _check_angle(t)
    return EPS_SCALE * math.exp(-t)


def eps_over_rho(t: float) -> float:
    _check_angle(t)
    return EPS_SCALE / (1.0 + math.exp(t))


def curve(alpha: float) -> np.ndarray:
    alpha = _check_angle(alpha, "alpha")
    r = 1.0 + math.exp(-alpha)
    return np.array([r * math.cos(alpha), r * math.sin(alpha)])


def to_degrees(angle: float) -> float:
    return math.degrees(angle)


def chord_sq(alpha: float, t: float) -> float:
    """f(t) = ||x(alpha + t) - x(alpha)||^2.

    Law of cosines rewritten with the half-angle identity,
    (rho_a - rho_b)^2 + 4 rho_a rho_b sin^2(t/2), which keeps full relative
    precision when t and the radial gap are tiny.
    """
    _check_angle(alpha, "alpha")
    _check_angle(t)
    decay = math.exp(-alpha)
    gap = -decay * math.expm1(-t)  # rho(alpha) - rho(alpha + t)
    ra = 1.0 + decay
    rb = ra - gap
    s = math.sin(0.5 * t)
    return gap * gap + 4.0 * ra * rb * s * s


def derivative_terms(alpha: float, t: float) -> Tuple[float, float, float]:
    """Three terms summing to f'(t) * exp(2(alpha + t)) / 2.

    Each is strictly positive for t in (0, pi/2), which makes f strictly
    increasing there.
    """
    _check_angle(alpha, "alpha")
    s, c = math.sin(t), math.cos(t)
    g1 = s * math.exp(2.0 * t + alpha) * (1.0 + math.exp(alpha))
    g2 = math.exp(alpha + t) * (s + c - 1.0)
    g3 = math.exp(t) * (s + c - math.exp(-t))
    return g1, g2, g3


def step_bracket(alpha: float) -> StepBracket:
    """Angles beta with ||x(beta) - x(alpha)|| <= eps(alpha) lie in this bracket."""
    alpha = _check_angle(alpha, "alpha")
    return StepBracket(lo=max(0.0, alpha + BRACKET_LOW_OFFSET), hi=alpha + BRACKET_HIGH_OFFSET)


def next_alpha(alpha: float, tol: Optional[float] = None) -> float:
    """The unique beta > alpha with ||x(beta) - x(alpha)|| = eps(alpha).

    Plain bisection of g(t) = f(t) - eps(alpha)^2 on [0, pi/2], where f is
    strictly increasing, so exactly one sign change exists.
    """
    alpha = _check_angle(alpha, "alpha")
    tol = get_settings().angle_tol if tol is None else tol
    if tol <= 0:
        raise DomainError("tol must be positive")
    target = eps(alpha) ** 2

    def g(t: float) -> float:
        return chord_sq(alpha, t) - target

    g_lo, g_hi = g(0.0), g(HALF_PI)
    if not (g_lo < 0.0 < g_hi):
        logger.error("no sign change on [0, pi/2] at alpha=%r: g(0)=%r g(pi/2)=%r", alpha, g_lo, g_hi)
        raise BracketInvalid(f"g does not change sign on [0, pi/2] at alpha={alpha!r}")

    t = bisect(g, 0.0, HALF_PI, xtol=tol, maxiter=200)
    if not (0.0 < t <= MAX_STEP):
        logger.error("step %r at alpha=%r outside (0, 40 deg]", t, alpha)
        raise BracketInvalid(f"step {t!r} at alpha={alpha!r} violates the 40 degree bound")
    beta = alpha + t
    if beta <= alpha:
        raise BracketInvalid(f"step {t!r} is below the angle resolution at alpha={alpha!r}")
    return beta
