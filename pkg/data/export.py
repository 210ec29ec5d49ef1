"""
Table exports for generated sequences and batch verdicts.
"""
import logging
from pathlib import Path
from typing import Iterable, Union

import pandas as pd

from schemas.experiment_schemas import ConvergenceVerdict
from schemas.sequence_schemas import SequenceReport
from utils.serialization import dumps

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["n", "alpha", "delta", "rho", "eps", "x", "y"]
FLOAT_FORMAT = "%.17g"


def sequence_to_frame(report: SequenceReport) -> pd.DataFrame:
    """One row per record; delta is NaN on the final row."""
    rows = [
        {"n": r.n, "alpha": r.alpha, "delta": r.delta, "rho": r.rho, "eps": r.eps, "x": r.x[0], "y": r.x[1]}
        for r in report.records
    ]
    df = pd.DataFrame(rows, columns=CSV_COLUMNS)
    df["delta"] = pd.to_numeric(df["delta"], errors="coerce")
    return df


def write_sequence_csv(report: SequenceReport, path: Union[str, Path]) -> Path:
    path = Path(path)
    sequence_to_frame(report).to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="")
    logger.info("wrote %d records to %s", len(report), path)
    return path


def write_sequence_json(report: SequenceReport, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(dumps(report.model_dump(), indent=2) + "\n", encoding="utf-8")
    logger.info("wrote %d records to %s", len(report), path)
    return path


def write_verdicts_jsonl(verdicts: Iterable[ConvergenceVerdict], path: Union[str, Path]) -> Path:
    """One ConvergenceVerdict per line, seed included for replay."""
    path = Path(path)
    lines = [dumps(v.model_dump()) for v in verdicts]
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    logger.info("wrote %d verdicts to %s", len(lines), path)
    return path
