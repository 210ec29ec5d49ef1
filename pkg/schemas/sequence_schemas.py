"""
Schemas for the spiral iterate sequence and its verification results.
"""
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator


class SpiralRecord(BaseModel):
    n: int = Field(ge=0)
    alpha: float = Field(ge=0)
    delta: Optional[float] = None  # alpha_{n+1} - alpha_n; None on the last record
    rho: float
    eps: float
    x: Tuple[float, float]
    q: Optional[float] = None  # rho_{n+1} / rho_n


class SequenceReport(BaseModel):
    records: List[SpiralRecord] = Field(min_length=1)
    partial_delta_sum: float
    partial_eps_sum: float
    max_identity_residual: float
    min_nearest_margin: Optional[float] = None
    stopped_early: bool = False
    max_alpha: float

    @model_validator(mode="after")
    def _check_telescoping(self):
        span = self.records[-1].alpha - self.records[0].alpha
        if abs(self.partial_delta_sum - span) > 1e-10:
            raise ValueError(
                f"partial_delta_sum {self.partial_delta_sum!r} does not telescope to {span!r}"
            )
        return self

    def __len__(self) -> int:
        return len(self.records)

    def alphas(self) -> np.ndarray:
        return np.fromiter((r.alpha for r in self.records), dtype=float, count=len(self.records))

    def rhos(self) -> np.ndarray:
        return np.fromiter((r.rho for r in self.records), dtype=float, count=len(self.records))

    def eps_values(self) -> np.ndarray:
        return np.fromiter((r.eps for r in self.records), dtype=float, count=len(self.records))

    def deltas(self) -> np.ndarray:
        """Filled deltas only (one fewer than the record count)."""
        return np.fromiter((r.delta for r in self.records[:-1]), dtype=float,
                           count=len(self.records) - 1)

    def points(self) -> np.ndarray:
        return np.array([r.x for r in self.records], dtype=float).reshape(-1, 2)


class LimitSummary(BaseModel):
    delta_tail: float
    eps_tail: float
    rho_tail: float
    sphere_gap_tail: float
    quotient_gap_tail: float  # 1 - q at the last filled record


class CheckResult(BaseModel):
    name: str
    passed: bool
    value: Optional[float] = None
    threshold: Optional[float] = None
    detail: str = ""


class VerificationReport(BaseModel):
    """Combined output of every sequence check."""
    horizon: int
    nearest_horizon: int
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]
