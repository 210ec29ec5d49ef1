"""
Generation of the spiral iterate sequence and the checks of its identities.

Every claim about the infinite sequence is checked on a finite prefix: per-step
identities exactly, limit statements through quantities that move
monotonically with the horizon.
"""
import logging
import math
from typing import Optional

import numpy as np

from geometry.euclid import max_circular_gap, nearest_in_cloud
from schemas.sequence_schemas import LimitSummary, SequenceReport, SpiralRecord
from spiral.curve import EPS_SCALE, MAX_STEP, curve, eps, next_alpha, rho
from utils.config import get_settings
from utils.errors import DomainError, NearestPropertyViolated, SequenceCheckFailed

logger = logging.getLogger(__name__)

MAX_ALPHA = 700.0  # exp(-alpha) underflow guard
MIN_LIMIT_RECORDS = 100


def generate(n_max: int, tol: Optional[float] = None, max_alpha: float = MAX_ALPHA) -> SequenceReport:
    """Build records x_0, ..., x_{n_max-1} starting from alpha_0 = 0."""
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    alphas = [0.0]
    stopped_early = False
    while len(alphas) < n_max:
        if alphas[-1] > max_alpha:
            logger.warning("alpha=%r exceeds max_alpha=%r after %d records; stopping",
                           alphas[-1], max_alpha, len(alphas))
            stopped_early = True
            break
        alphas.append(next_alpha(alphas[-1], tol))

    records = []
    points = [curve(a) for a in alphas]
    residual = 0.0
    for n, alpha in enumerate(alphas):
        delta = q = None
        if n + 1 < len(alphas):
            delta = alphas[n + 1] - alpha
            q = rho(alphas[n + 1]) / rho(alpha)
            residual = max(residual, abs(float(np.linalg.norm(points[n] - points[n + 1])) - eps(alpha)))
        records.append(SpiralRecord(
            n=n, alpha=alpha, delta=delta, rho=rho(alpha), eps=eps(alpha),
            x=(float(points[n][0]), float(points[n][1])), q=q,
        ))

    deltas = [r.delta for r in records[:-1]]
    report = SequenceReport(
        records=records,
        partial_delta_sum=math.fsum(deltas),
        partial_eps_sum=math.fsum(r.eps for r in records[:-1]),
        max_identity_residual=residual,
        stopped_early=stopped_early,
        max_alpha=max_alpha,
    )
    logger.info("generated %d records, alpha_last=%.6g", len(records), alphas[-1])
    return report


def _require_steps(report: SequenceReport) -> bool:
    return len(report.records) >= 2


def check_step_identity(report: SequenceReport) -> float:
    """max_n | ||x_n - x_{n+1}|| - eps_n |, recomputed from the stored points."""
    if not _require_steps(report):
        return 0.0
    pts = report.points()
    chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    return float(np.max(np.abs(chords - report.eps_values()[:-1])))


def check_halfangle_identity(report: SequenceReport, scaled: bool = False) -> float:
    """Residual of eps_n^2 = (rho_n - rho_{n+1})^2 + 4 rho_n rho_{n+1} sin^2(delta_n / 2).

    With ``scaled`` both sides are divided by rho_n^2:
    (eps_n / rho_n)^2 = (1 - q_n)^2 + 4 q_n sin^2(delta_n / 2).
    """
    if not _require_steps(report):
        return 0.0
    rhos = report.rhos()
    rho_n, rho_next = rhos[:-1], rhos[1:]
    eps_n = report.eps_values()[:-1]
    half_sin_sq = np.sin(0.5 * report.deltas()) ** 2
    if scaled:
        alphas = report.alphas()[:-1]
        q = np.fromiter((r.q for r in report.records[:-1]), dtype=float, count=len(alphas))
        lhs = (EPS_SCALE / (1.0 + np.exp(alphas))) ** 2
        rhs = (1.0 - q) ** 2 + 4.0 * q * half_sin_sq
    else:
        lhs = eps_n ** 2
        rhs = (rho_n - rho_next) ** 2 + 4.0 * rho_n * rho_next * half_sin_sq
    return float(np.max(np.abs(lhs - rhs)))


def check_brackets(report: SequenceReport) -> float:
    """Every delta_n lies in (0, 40 degrees]; returns the largest delta."""
    if not _require_steps(report):
        return 0.0
    deltas = report.deltas()
    bad = np.flatnonzero((deltas <= 0.0) | (deltas > MAX_STEP))
    if bad.size:
        n = int(bad[0])
        raise SequenceCheckFailed("step bracket", f"delta_{n}={deltas[n]!r} outside (0, 40 deg]")
    return float(deltas.max())


def check_telescoping(report: SequenceReport) -> float:
    """| sum delta_k - (alpha_N - alpha_0) |."""
    span = report.records[-1].alpha - report.records[0].alpha
    return abs(report.partial_delta_sum - span)


def check_eps_decreasing(report: SequenceReport) -> None:
    eps_values = report.eps_values()
    bad = np.flatnonzero(np.diff(eps_values) >= 0.0)
    if bad.size:
        raise SequenceCheckFailed("eps monotonicity", f"eps_{int(bad[0]) + 1} >= eps_{int(bad[0])}")


def check_quotients(report: SequenceReport) -> float:
    """q_n lies in (0, 1) for every step; returns 1 - q at the last step."""
    if not _require_steps(report):
        return 0.0
    q = np.fromiter((r.q for r in report.records[:-1]), dtype=float, count=len(report.records) - 1)
    bad = np.flatnonzero((q <= 0.0) | (q >= 1.0))
    if bad.size:
        raise SequenceCheckFailed("radius quotient", f"q_{int(bad[0])}={q[bad[0]]!r} outside (0, 1)")
    return float(1.0 - q[-1])


def check_limits(report: SequenceReport) -> LimitSummary:
    """Tail values of delta, eps, rho and the sphere gap, with their monotone trends asserted."""
    if len(report.records) < MIN_LIMIT_RECORDS:
        raise DomainError(f"limit checks need at least {MIN_LIMIT_RECORDS} records")
    deltas = report.deltas()
    if np.any(deltas <= 0.0):
        raise SequenceCheckFailed("delta positivity", "some delta_n is not strictly positive")
    if not deltas[-1] < deltas[0]:
        raise SequenceCheckFailed("delta decay", f"delta_tail={deltas[-1]!r} not below delta_0={deltas[0]!r}")
    check_eps_decreasing(report)
    gaps = np.abs(np.linalg.norm(report.points(), axis=1) - 1.0)
    bad = np.flatnonzero(np.diff(gaps) >= 0.0)
    if bad.size:
        raise SequenceCheckFailed("sphere gap decay", f"| ||x_n|| - 1 | does not decrease at n={int(bad[0]) + 1}")
    last = report.records[-1]
    return LimitSummary(
        delta_tail=float(deltas[-1]),
        eps_tail=last.eps,
        rho_tail=last.rho,
        sphere_gap_tail=float(gaps[-1]),
        quotient_gap_tail=check_quotients(report),
    )


def circular_gap(report: SequenceReport) -> float:
    """Largest angular hole left by {alpha_n mod 2pi}; shrinks as the horizon grows."""
    return max_circular_gap(report.alphas())


def taylor_onset_index(report: SequenceReport) -> int:
    """First k0 such that sin(delta_k / 2) >= delta_k / 4 for every k >= k0."""
    if not _require_steps(report):
        return 0
    deltas = report.deltas()
    failing = np.flatnonzero(np.sin(0.5 * deltas) < 0.25 * deltas)
    return int(failing[-1]) + 1 if failing.size else 0


def check_divergence_surrogate(report: SequenceReport) -> float:
    """sum_{k >= k0} eps_k - (alpha_N - alpha_{k0}) / 2, which must stay positive.

    Backed per step by eps_k > 2 sin(delta_k / 2) >= delta_k / 2.
    """
    if not _require_steps(report):
        return 0.0
    k0 = taylor_onset_index(report)
    eps_n = report.eps_values()[:-1]
    deltas = report.deltas()
    bad = np.flatnonzero(eps_n <= 2.0 * np.sin(0.5 * deltas))
    if bad.size:
        raise SequenceCheckFailed("chord versus arc", f"eps_{int(bad[0])} <= 2 sin(delta/2)")
    alphas = report.alphas()
    margin = math.fsum(eps_n[k0:]) - 0.5 * (alphas[-1] - alphas[k0])
    if margin <= 0.0:
        raise SequenceCheckFailed("divergence surrogate", f"partial eps sum falls short by {-margin!r}")
    return margin


def check_no_earlier_point(report: SequenceReport, n: int) -> float:
    """min_{k<n} ||x_k - x_n|| - eps_n; no earlier point may beat x_{n+1}."""
    if not 0 <= n < len(report.records) - 1:
        raise DomainError(f"n={n} needs a successor record")
    if n == 0:
        return math.inf
    pts = report.points()
    dists = np.linalg.norm(pts[:n] - pts[n], axis=1)
    k = int(np.argmin(dists))
    gap = float(dists[k]) - report.records[n].eps
    if gap <= 0.0:
        raise NearestPropertyViolated(n, k)
    return gap


def verify_nearest(report: SequenceReport, horizon: Optional[int] = None) -> float:
    """Brute-force check that x_{n+1} is the unique nearest point to x_n.

    Searches {x_0, ..., x_horizon} minus x_n for every n < horizon - 1 and checks
    the unit circle never wins: exp(-alpha_n) > eps_n. Returns the smallest
    margin seen across both checks.
    """
    count = len(report.records)
    if horizon is None:
        horizon = min(get_settings().nearest_horizon, count - 1)
    if not 1 <= horizon <= count - 1:
        raise DomainError(f"horizon must lie in [1, {count - 1}], got {horizon}")
    pts = report.points()[: horizon + 1]
    margin = math.inf
    for n in range(horizon - 1):
        idx, _, gap = nearest_in_cloud(pts, pts[n], exclude=n)
        if idx != n + 1 or gap <= 0.0:
            raise NearestPropertyViolated(n, idx)
        margin = min(margin, gap)

    alphas = report.alphas()[: horizon + 1]
    sphere_gap = np.exp(-alphas) - report.eps_values()[: horizon + 1]
    if np.any(sphere_gap <= 0.0):
        n = int(np.flatnonzero(sphere_gap <= 0.0)[0])
        raise SequenceCheckFailed("sphere distance", f"d_S(x_{n}) <= eps_{n}")
    return min(margin, float(sphere_gap.min()))


def with_nearest_margin(report: SequenceReport, horizon: Optional[int] = None) -> SequenceReport:
    return report.model_copy(update={"min_nearest_margin": verify_nearest(report, horizon)})
