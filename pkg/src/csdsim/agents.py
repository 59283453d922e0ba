"""Agent decision rules.

Every function here is pure: draws are passed in, never made, so each rule
can be pinned by a table of (inputs, expected) rows and reused verbatim by
the event loop.
"""

from __future__ import annotations

from typing import Optional

from .config import RunConfig
from .domain import Agent, BeltTable, REGISTRABLE_STATES, Submission, Task, skills_match

# Reasons a registration attempt dies before any dice are rolled.
REASON_NOT_REGISTRABLE = "not_registrable"
REASON_ALREADY_REGISTERED = "already_registered"
REASON_OPEN_LIST_FULL = "open_list_full"
REASON_SKILL_MISMATCH = "skill_mismatch"
REASON_ZERO_RATING = "zero_rating"
REASON_BELT_EXCLUDED = "belt_excluded"


def registration_preconditions(
    agent: Agent, task: Task, cfg: RunConfig, admitted: Optional[frozenset] = None
) -> Optional[str]:
    """Return a reason code when the pair cannot register, else None."""
    if task.state not in REGISTRABLE_STATES:
        return REASON_NOT_REGISTRABLE
    if admitted is not None and agent.belt not in admitted:
        return REASON_BELT_EXCLUDED
    if len(agent.open_list) >= cfg.open_list_cap:
        return REASON_OPEN_LIST_FULL
    if agent.rating <= 0.0:
        return REASON_ZERO_RATING
    if not skills_match(agent.skills, task.skills, cfg.match_mode):
        return REASON_SKILL_MISMATCH
    if task.task_id in agent.open_list:
        return REASON_ALREADY_REGISTERED
    return None


def decide_register(
    registrant_count: int,
    draw: float,
    crowd_draw: float,
    *,
    threshold: float = 0.8,
    competition_cap: int = 18,
    crowded_p: float = 0.3,
) -> bool:
    """Commit-or-balk rule at the registration desk.

    Under the cap the agent commits only on a high interest draw. At or over
    the cap interest no longer matters; a minority keeps piling in anyway.
    """
    if registrant_count < competition_cap:
        return draw >= threshold
    return crowd_draw < crowded_p


def preference_weight(similarity: float, belt: str, cfg: RunConfig) -> float:
    """How appealing a task looks given its similarity to past postings.

    Most of the crowd hunts novelty, so appeal falls steeply as similarity
    rises. Newcomer belts instead regain interest in highly familiar work
    past the pivot: repetition is their entry ticket.
    """
    novelty = (1.0 - similarity) ** cfg.novelty_exponent
    if belt in cfg.familiarity_belts:
        familiar = cfg.familiarity_gain * (similarity - cfg.familiarity_pivot)
        return max(0.0, novelty, familiar)
    return max(0.0, novelty)


def pool_crowding_factor(
    similarity: float, mean_other_similarity: float, cfg: RunConfig
) -> float:
    """Attention discount when the open pool is full of lookalike tasks."""
    factor = 1.0 - cfg.pool_crowding_coeff * similarity * mean_other_similarity
    return max(0.0, factor)


def registration_engagement(
    similarity: float,
    mean_other_similarity: float,
    belt: str,
    concentration: float,
    cfg: RunConfig,
) -> float:
    """Probability that a browsing agent stops on this task at all."""
    w = preference_weight(similarity, belt, cfg)
    crowd = pool_crowding_factor(similarity, mean_other_similarity, cfg)
    return min(1.0, w * crowd * cfg.engagement_scale * concentration)


def decide_submit(draw: float, p_qualified: float, threshold: float) -> bool:
    """Follow-through rule for turning a registration into a submission.

    The product gate makes low-odds belts submit more readily: with little
    reputation at stake they fire away, while strong belts hold work back
    unless the draw is unusually favourable.
    """
    return draw * p_qualified < threshold


def submission_crowd_suppression(registrant_count: int, cfg: RunConfig) -> float:
    """Odds multiplier once a task's field grows past the competition cap."""
    excess = max(0, registrant_count - cfg.competition_cap)
    return 1.0 / (1.0 + cfg.crowd_penalty_coeff * excess)


def score_submission(draw: float, quality_pass: float):
    """Map a unit draw to a 0..100 review score plus its qualified flag.

    Review quality is not belt dependent; belts only shape who submits.
    """
    score = draw * 100.0
    return score, score >= quality_pass


def determine_winner(submissions) -> Optional[Submission]:
    """Best qualified score wins; ties go to the earliest submission."""
    winner = None
    for sub in submissions:
        if not sub.qualified:
            continue
        if winner is None or sub.score > winner.score or (
            sub.score == winner.score and sub.time < winner.time
        ):
            winner = sub
    return winner


def update_reliability(agent: Agent, qualified: bool) -> None:
    """Record one registration outcome in the agent's rolling window."""
    agent.recent_outcomes.append(1.0 if qualified else 0.0)
