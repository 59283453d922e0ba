"""Platform-level machinery: content sampling, population spawning, ratios."""

from __future__ import annotations

import math
from collections import deque
from typing import Optional

from scipy.special import betainc

from .config import RunConfig
from .domain import Agent, BeltTable


def poisson_count(rng, lam: float) -> int:
    """Poisson draw via exponential inter-arrival sums; safe for large rates."""
    if lam <= 0.0:
        return 0
    total = 0.0
    count = 0
    while True:
        total += rng.expovariate(1.0)
        if total > lam:
            return count
        count += 1


def arrival_count(rng, rate: float, cfg: RunConfig) -> int:
    """Expected arrivals for one run under the configured rate unit."""
    lam = rate * cfg.horizon_days if cfg.arrival_rate_unit == "per_day" else rate
    return poisson_count(rng, lam)


def sample_similarity(rng, cfg: RunConfig) -> float:
    """Similarity of a new posting to the platform's recent history.

    An openness gate narrows the whole posting mix around the gate value;
    the regime changes what the platform publishes, not just one task.
    """
    if cfg.openness_gate is None:
        return rng.uniform(cfg.similarity_low, cfg.similarity_high)
    low = max(cfg.similarity_low, cfg.openness_gate - cfg.openness_halfwidth)
    high = min(cfg.similarity_high, cfg.openness_gate + cfg.openness_halfwidth)
    return rng.uniform(low, high)


def sample_award(rng, cfg: RunConfig) -> float:
    return rng.uniform(cfg.award_low, cfg.award_high)


def sample_experience(rng, cfg: RunConfig) -> float:
    """Ratings pile up near the bottom; a long thin tail carries the elite."""
    return rng.betavariate(cfg.experience_alpha, cfg.experience_beta) * cfg.experience_max


def sample_skill_mask(rng, lo: int, hi: int, vocabulary) -> int:
    count = rng.randint(lo, hi)
    mask = 0
    for index in rng.sample(range(len(vocabulary)), count):
        mask |= 1 << index
    return mask


def spawn_agent(
    agent_id: int,
    arrival: float,
    exp_rng,
    skill_rng,
    cfg: RunConfig,
    belt_table: BeltTable,
) -> Agent:
    rating = sample_experience(exp_rng, cfg)
    return Agent(
        agent_id=agent_id,
        arrival=arrival,
        rating=rating,
        belt=belt_table.belt_of(rating),
        skills=sample_skill_mask(skill_rng, cfg.agent_skills_min, cfg.agent_skills_max, cfg.skill_vocabulary),
        recent_outcomes=deque(maxlen=cfg.reliability_window),
    )


def utilization(busy_agents: int, total_agents: int) -> float:
    if total_agents <= 0:
        return 0.0
    return busy_agents / total_agents


def pool_openness(similarity_sum: float, pool_size: int) -> float:
    """Mean similarity across the currently browsable pool."""
    if pool_size <= 0:
        return 0.0
    return similarity_sum / pool_size


def rating_share(lower: float, upper: float, cfg: RunConfig) -> float:
    """Population mass whose rating lands in (lower, upper] under the
    configured experience distribution."""
    scale = cfg.experience_max
    lo = min(max(lower / scale, 0.0), 1.0)
    hi = min(max(upper / scale, 0.0), 1.0) if not math.isinf(upper) else 1.0
    a, b = cfg.experience_alpha, cfg.experience_beta
    return float(betainc(a, b, hi) - betainc(a, b, lo))


def implied_belt_shares(belt_table: BeltTable, cfg: RunConfig) -> dict:
    """Belt shares implied by the rating distribution, not the published table."""
    shares = {}
    lower = 0.0
    for row in belt_table.rows:
        shares[row.belt] = rating_share(lower, row.upper_bound, cfg)
        lower = row.upper_bound
    return shares


def supply_concentration(
    belt_table: BeltTable, admitted: Optional[frozenset], cfg: RunConfig
) -> float:
    """Attention multiplier for a belt-gated platform.

    Gating shrinks the labour supply; the platform concentrates what is
    left by steering the admitted belts across more candidate tasks per
    browsing session. Capped so a near-empty gate cannot explode.
    """
    if not admitted:
        return 1.0
    shares = implied_belt_shares(belt_table, cfg)
    mass = sum(shares.get(belt, 0.0) for belt in admitted)
    if mass <= 0.0:
        return cfg.supply_concentration_max
    return min(cfg.supply_concentration_max, 1.0 / mass)
