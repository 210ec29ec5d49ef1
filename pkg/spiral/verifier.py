"""
Sequence Verifier
Runs every identity and limit check over a generated prefix and gathers the
outcomes into one VerificationReport.
"""
import logging
import math
from typing import Callable, List, Optional

from schemas.sequence_schemas import CheckResult, SequenceReport, VerificationReport
from spiral import sequence
from spiral.curve import EPS_SCALE
from utils.config import get_settings
from utils.errors import AltProjError, SequenceCheckFailed

logger = logging.getLogger(__name__)

IDENTITY_TOL = 1e-10
SCALED_IDENTITY_TOL = 1e-12
INIT_EPS_TOL = 1e-15


class SequenceVerifier:
    def __init__(self, nearest_horizon: Optional[int] = None):
        self.nearest_horizon = nearest_horizon

    def _run_check(self, name: str, fn: Callable[[], Optional[float]],
                   threshold: Optional[float] = None) -> CheckResult:
        """Evaluate one check; a returned value is compared against ``threshold`` when given."""
        try:
            value = fn()
        except AltProjError as exc:
            logger.warning("check '%s' failed: %s", name, exc)
            return CheckResult(name=name, passed=False, threshold=threshold, detail=str(exc))
        passed = threshold is None or (value is not None and value <= threshold)
        if not passed:
            logger.warning("check '%s' value %r exceeds %r", name, value, threshold)
        if value is not None and not math.isfinite(value):
            value = None
        return CheckResult(name=name, passed=passed, value=value, threshold=threshold)

    def _check_initial(self, report: SequenceReport) -> float:
        first = report.records[0]
        if first.alpha != 0.0 or first.x != (2.0, 0.0):
            raise SequenceCheckFailed(
                "initial point", f"x_0={first.x!r} at alpha_0={first.alpha!r}, expected (2, 0) at 0"
            )
        return abs(first.eps - EPS_SCALE)

    def run(self, report: SequenceReport) -> VerificationReport:
        """
        Run all checks in a fixed order and return the combined report.

        Args:
            report: Sequence prefix from sequence.generate()

        Returns:
            VerificationReport listing every check, failed or not
        """
        horizon = len(report) - 1
        nearest_horizon = self.nearest_horizon
        if nearest_horizon is None:
            nearest_horizon = min(get_settings().nearest_horizon, horizon)
        nearest_horizon = max(1, min(nearest_horizon, horizon))

        checks: List[CheckResult] = [
            self._run_check("initial point x_0 = (2, 0) and eps_0 closed form",
                            lambda: self._check_initial(report), INIT_EPS_TOL),
            self._run_check("step identity ||x_n - x_{n+1}|| = eps_n",
                            lambda: sequence.check_step_identity(report), IDENTITY_TOL),
            self._run_check("half-angle identity",
                            lambda: sequence.check_halfangle_identity(report), IDENTITY_TOL),
            self._run_check("half-angle identity divided by rho_n^2",
                            lambda: sequence.check_halfangle_identity(report, scaled=True),
                            SCALED_IDENTITY_TOL),
            self._run_check("step bracket 0 < delta_n <= 40 deg",
                            lambda: sequence.check_brackets(report)),
            self._run_check("telescoping sum of deltas",
                            lambda: sequence.check_telescoping(report), IDENTITY_TOL),
            self._run_check("eps strictly decreasing",
                            lambda: sequence.check_eps_decreasing(report)),
            self._run_check("radius quotients in (0, 1)",
                            lambda: sequence.check_quotients(report)),
        ]
        if horizon >= 1:
            checks.append(self._run_check(
                f"x_(n+1) unique nearest to x_n among x_0..x_{nearest_horizon}",
                lambda: sequence.verify_nearest(report, nearest_horizon),
            ))
        if len(report) >= sequence.MIN_LIMIT_RECORDS:
            checks.append(self._run_check(
                "limit trends of delta, eps and sphere gap",
                lambda: sequence.check_limits(report).delta_tail,
            ))
            checks.append(self._run_check(
                "divergence of the partial eps sums",
                lambda: sequence.check_divergence_surrogate(report),
            ))
        else:
            logger.info("skipping limit checks: %d records < %d", len(report), sequence.MIN_LIMIT_RECORDS)

        result = VerificationReport(horizon=horizon, nearest_horizon=nearest_horizon, checks=checks)
        logger.info("verification over %d records: %d/%d checks passed",
                    len(report), len(checks) - len(result.failures()), len(checks))
        return result
