"""Run-history ingestion and forecast evaluation.

A history CSV is the ground truth: one row per task with its outcome. A
predictions CSV carries the forecast trail: one row per risk update. The
evaluation aligns both into daily per-phase series and scores the forecast
with MRE, correlation, and a bias t-test.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

from .scenarios import mre, pearson_with_p, t_test_one_sample


class DataError(Exception):
    """A history or predictions file failed row-level validation."""


HISTORY_COLUMNS = (
    "task_id",
    "posted_day",
    "duration_days",
    "registrants",
    "submissions",
    "outcome",
    "failure_phase",
)

PREDICTION_COLUMNS = ("task_id", "day", "phase", "prediction")

VALID_OUTCOMES = frozenset(
    ("completed", "failed", "starved", "dropped", "arrived", "registered", "submitted")
)
FAILED_OUTCOMES = frozenset(("failed", "starved", "dropped"))
PHASES = ("registration", "submission")


@dataclass(frozen=True)
class HistoryRow:
    task_id: str
    posted_day: float
    duration_days: float
    registrants: int
    submissions: int
    outcome: str
    failure_phase: str

    @property
    def deadline_day(self) -> int:
        return int(math.floor(self.posted_day + self.duration_days))

    @property
    def failed(self) -> bool:
        return self.outcome in FAILED_OUTCOMES

    @property
    def phase(self) -> Optional[str]:
        """Failure phase, inferred from the submission count when absent."""
        if not self.failed:
            return None
        if self.failure_phase:
            return self.failure_phase
        return "submission" if self.submissions else "registration"


def _row_error(row_num: int, message: str) -> DataError:
    return DataError(f"row {row_num}: {message}")


def _validate_row(row: HistoryRow, row_num: int) -> None:
    if not row.task_id:
        raise _row_error(row_num, "task_id is empty")
    if row.posted_day < 0:
        raise _row_error(row_num, "posted_day is negative")
    if row.duration_days <= 0:
        raise _row_error(row_num, "duration_days must be positive")
    if row.registrants < 0 or row.submissions < 0:
        raise _row_error(row_num, "counts must be non-negative")
    if row.outcome not in VALID_OUTCOMES:
        raise _row_error(row_num, f"unknown outcome {row.outcome!r}")
    if row.submissions > 0 and row.registrants == 0:
        raise _row_error(row_num, "submissions without registrants")
    if row.outcome == "starved" and row.registrants != 0:
        raise _row_error(row_num, "a starved task cannot have registrants")
    if row.outcome == "dropped" and row.submissions != 0:
        raise _row_error(row_num, "a dropped task cannot have submissions")
    if row.outcome == "failed" and row.submissions == 0:
        raise _row_error(row_num, "a review failure requires submissions")
    if row.failure_phase and row.failure_phase not in PHASES:
        raise _row_error(row_num, f"unknown failure_phase {row.failure_phase!r}")


def ingest_history(path: str):
    """Load and validate a history CSV. Extra columns are tolerated."""
    rows = []
    seen = set()
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            lines = (line for line in fh if not line.startswith("#"))
            reader = csv.DictReader(lines)
            missing = set(HISTORY_COLUMNS) - set(reader.fieldnames or ())
            if missing:
                raise DataError(f"history {path}: missing columns {sorted(missing)}")
            for row_num, rec in enumerate(reader, start=2):
                try:
                    row = HistoryRow(
                        task_id=(rec["task_id"] or "").strip(),
                        posted_day=float(rec["posted_day"]),
                        duration_days=float(rec["duration_days"]),
                        registrants=int(rec["registrants"]),
                        submissions=int(rec["submissions"]),
                        outcome=(rec["outcome"] or "").strip(),
                        failure_phase=(rec["failure_phase"] or "").strip(),
                    )
                except (TypeError, ValueError) as exc:
                    raise _row_error(row_num, f"bad cell: {exc}") from None
                _validate_row(row, row_num)
                if row.task_id in seen:
                    raise _row_error(row_num, f"duplicate task_id {row.task_id}")
                seen.add(row.task_id)
                rows.append(row)
    except OSError as exc:
        raise DataError(f"cannot read history {path}: {exc}") from None
    if not rows:
        raise DataError(f"history {path}: no data rows")
    return rows


def ingest_predictions(path: str) -> dict:
    """Load a predictions CSV into {(task_id, phase): latest value}."""
    latest: dict = {}
    latest_day: dict = {}
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            lines = (line for line in fh if not line.startswith("#"))
            reader = csv.DictReader(lines)
            missing = set(PREDICTION_COLUMNS) - set(reader.fieldnames or ())
            if missing:
                raise DataError(f"predictions {path}: missing columns {sorted(missing)}")
            for row_num, rec in enumerate(reader, start=2):
                task_id = (rec["task_id"] or "").strip()
                phase = (rec["phase"] or "").strip()
                if not task_id:
                    raise _row_error(row_num, "task_id is empty")
                if phase not in PHASES:
                    raise _row_error(row_num, f"unknown phase {phase!r}")
                try:
                    day = float(rec["day"])
                    value = float(rec["prediction"])
                except (TypeError, ValueError) as exc:
                    raise _row_error(row_num, f"bad cell: {exc}") from None
                if day < 0:
                    raise _row_error(row_num, "day is negative")
                if value < 0:
                    raise _row_error(row_num, "prediction is negative")
                key = (task_id, phase)
                if key not in latest_day or day >= latest_day[key]:
                    latest_day[key] = day
                    latest[key] = value
    except OSError as exc:
        raise DataError(f"cannot read predictions {path}: {exc}") from None
    return latest


@dataclass(frozen=True)
class PhaseEvaluation:
    phase: str
    n_days: int
    actual_total: float
    predicted_total: float
    mre: Optional[float]
    pearson_r: Optional[float]
    pearson_p: Optional[float]
    t_stat: Optional[float]
    t_p: Optional[float]


def evaluate_forecast(history_rows, latest_predictions) -> dict:
    """Score per-phase daily forecast series against realized failures.

    Actual failures land on each task's deadline day. Predicted failures
    are the per-day sums of every task's latest per-phase risk, failed or
    not: a forecast is expected mass, not a verdict list.
    """
    actual = {phase: {} for phase in PHASES}
    predicted = {phase: {} for phase in PHASES}
    for row in history_rows:
        day = row.deadline_day
        phase = row.phase
        if phase is not None:
            actual[phase][day] = actual[phase].get(day, 0) + 1
        for p in PHASES:
            value = latest_predictions.get((row.task_id, p))
            if value is not None:
                predicted[p][day] = predicted[p].get(day, 0.0) + value
    out = {}
    for phase in PHASES:
        days = sorted(set(actual[phase]) | set(predicted[phase]))
        af = [float(actual[phase].get(d, 0)) for d in days]
        fp = [float(predicted[phase].get(d, 0.0)) for d in days]
        af_total = sum(af)
        fp_total = sum(fp)
        corr = pearson_with_p(af, fp)
        diffs = [a - f for a, f in zip(af, fp)]
        ttest = t_test_one_sample(diffs) if diffs else None
        out[phase] = PhaseEvaluation(
            phase=phase,
            n_days=len(days),
            actual_total=af_total,
            predicted_total=fp_total,
            mre=mre(af_total, fp_total),
            pearson_r=corr[0] if corr else None,
            pearson_p=corr[1] if corr else None,
            t_stat=ttest[0] if ttest else None,
            t_p=ttest[1] if ttest else None,
        )
    return out


def result_history_rows(result) -> list:
    """Adapt one replication's task log to validated history rows."""
    rows = []
    for rec in result.task_log:
        rows.append(
            HistoryRow(
                task_id=str(rec["task_id"]),
                posted_day=rec["posted_day"],
                duration_days=rec["duration_days"],
                registrants=rec["registrants"],
                submissions=rec["submissions"],
                outcome=rec["outcome"],
                failure_phase=rec["failure_phase"],
            )
        )
    return rows


def result_latest_predictions(result) -> dict:
    """Adapt one replication's prediction trail to string-keyed form."""
    return {
        (str(tid), phase): value
        for (tid, phase), value in result.latest_prediction.items()
    }
