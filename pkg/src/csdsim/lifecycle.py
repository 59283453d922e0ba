"""Task lifecycle arithmetic: risk scores, review resolution, reposting.

The two forecast signals live here. FPR scores one task from who has
registered so far; FPS scores the platform-wide starvation trend and is
applied to every task that has reached the submission phase.
"""

from __future__ import annotations

from typing import Optional

from .agents import determine_winner
from .config import RunConfig
from .domain import Task, TaskState


def compute_fpr(registrant_profile) -> float:
    """Failure prediction from the registrant roster.

    ``registrant_profile`` is an iterable of (reliability, p_qualified)
    pairs. The weighted mass is discounted harder as total reliability on
    the task grows: a deep roster has slack, a shallow one does not.
    """
    total_rel = 0.0
    weighted = 0.0
    for reliability, p_qualified in registrant_profile:
        total_rel += reliability
        weighted += reliability * p_qualified
    if total_rel > 2.0:
        return weighted / 3.0
    if total_rel > 1.0:
        return weighted / 2.0
    return weighted


def compute_tsr(submitted_total: int, registered_total: int, invert: bool = False) -> float:
    """Task starvation ratio: share of registered tasks still without work.

    With ``invert`` the complementary share (tasks that did get work) is
    returned instead; some deployments publish it that way round.
    """
    if registered_total <= 0:
        return 0.0
    fed = submitted_total / registered_total
    return fed if invert else 1.0 - fed


def compute_fps(tsr: float, slope: float, intercept: float) -> float:
    """Linear starvation-to-failure calibration applied platform wide."""
    return slope * tsr + intercept


def compute_tcr(completed_total: int, registered_total: int) -> float:
    if registered_total <= 0:
        return 0.0
    return completed_total / registered_total


def compute_tfr(completed_total: int, registered_total: int) -> float:
    return 1.0 - compute_tcr(completed_total, registered_total)


def sample_duration(rng, cfg: RunConfig) -> float:
    # random.triangular takes (low, high, mode), not (low, mode, high)
    return rng.triangular(cfg.duration_min, cfg.duration_max, cfg.duration_mode)


def resolve_review(task: Task):
    """Score the review queue: a qualified winner completes the task.

    Returns the winning submission or None. The caller owns counter and
    reliability updates.
    """
    winner = determine_winner(task.submissions)
    if winner is not None:
        task.transition(TaskState.COMPLETED)
        task.winner = winner.agent_id
    else:
        task.transition(TaskState.FAILED)
        task.failure_phase = "submission"
    return winner


def failure_phase_of(state: TaskState, submission_count: int) -> Optional[str]:
    """Phase bucket for a failed task; None for non-failures.

    Tasks that never produced work failed while gathering a crowd; tasks
    whose work flunked review failed in the submission phase.
    """
    if state in (TaskState.STARVED, TaskState.DROPPED):
        return "registration"
    if state is TaskState.FAILED:
        return "submission" if submission_count else "registration"
    return None


def repost(task: Task, now: float, new_id: int, attractable: bool) -> Task:
    """Clone a dead task as a fresh posting with the clock restarted."""
    return Task(
        task_id=new_id,
        arrival=now,
        duration=task.duration,
        similarity=task.similarity,
        award=task.award,
        skills=task.skills,
        attractable=attractable,
        repost_count=task.repost_count + 1,
        root_id=task.root_id,
    )
