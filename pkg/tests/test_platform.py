"""Arrival processes, samplers, and population-level quantities."""

import dataclasses
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csdsim import RunConfig
from csdsim.domain import DEFAULT_BELT_TABLE
from csdsim.platform import (
    arrival_count,
    implied_belt_shares,
    poisson_count,
    pool_openness,
    rating_share,
    sample_award,
    sample_experience,
    sample_similarity,
    sample_skill_mask,
    spawn_agent,
    supply_concentration,
    utilization,
)

CFG = RunConfig()


def test_poisson_zero_rate_is_zero():
    rng = random.Random(1)
    assert poisson_count(rng, 0.0) == 0
    assert poisson_count(rng, -5.0) == 0


def test_poisson_mean_within_four_sigma():
    rng = random.Random(2)
    n = 400
    lam = 87.0
    counts = [poisson_count(rng, lam) for _ in range(n)]
    mean = sum(counts) / n
    assert abs(mean - lam) < 4 * math.sqrt(lam / n)


@given(lam=st.floats(min_value=0, max_value=40), seed=st.integers(0, 2**16))
@settings(max_examples=60, deadline=None)
def test_poisson_count_is_a_count(lam, seed):
    value = poisson_count(random.Random(seed), lam)
    assert isinstance(value, int)
    assert value >= 0


def test_arrival_count_rate_units():
    per_run = arrival_count(random.Random(3), 87.0, CFG)
    per_day_cfg = dataclasses.replace(CFG, arrival_rate_unit="per_day")
    per_day = arrival_count(random.Random(3), 87.0, per_day_cfg)
    # per-day scales by the horizon: wildly more arrivals
    assert per_day > per_run * 10


def test_similarity_bounds():
    rng = random.Random(4)
    draws = [sample_similarity(rng, CFG) for _ in range(2000)]
    assert 0.30 <= min(draws)
    assert max(draws) <= 0.98


def test_similarity_gate_narrows_the_band():
    gated = dataclasses.replace(CFG, openness_gate=0.90)
    rng = random.Random(5)
    draws = [sample_similarity(rng, gated) for _ in range(2000)]
    assert min(draws) >= 0.82 - 1e-12
    assert max(draws) <= 0.98 + 1e-12


def test_similarity_gate_clamps_to_global_bounds():
    gated = dataclasses.replace(CFG, openness_gate=0.32)
    rng = random.Random(6)
    draws = [sample_similarity(rng, gated) for _ in range(2000)]
    assert min(draws) >= 0.30  # the global floor wins over gate - halfwidth
    assert max(draws) <= 0.40 + 1e-12


def test_award_bounds():
    rng = random.Random(7)
    draws = [sample_award(rng, CFG) for _ in range(500)]
    assert 250.0 <= min(draws) and max(draws) <= 1250.0


def test_experience_bounds():
    rng = random.Random(8)
    draws = [sample_experience(rng, CFG) for _ in range(2000)]
    assert 0.0 <= min(draws) and max(draws) <= 3000.0


def test_skill_mask_counts():
    rng = random.Random(9)
    vocab = CFG.skill_vocabulary
    for _ in range(300):
        mask = sample_skill_mask(rng, 1, 3, vocab)
        assert 1 <= bin(mask).count("1") <= 3
        assert mask < (1 << len(vocab))


def test_spawn_agent_is_consistent():
    agent = spawn_agent(5, 1.5, random.Random(10), random.Random(11), CFG, DEFAULT_BELT_TABLE)
    assert agent.agent_id == 5
    assert agent.arrival == 1.5
    assert agent.belt == DEFAULT_BELT_TABLE.belt_of(agent.rating)
    assert agent.recent_outcomes.maxlen == CFG.reliability_window
    assert agent.open_list == [] and agent.pending == []


def test_utilization_edges():
    assert utilization(0, 0) == 0.0
    assert utilization(3, 4) == 0.75


def test_pool_openness_edges():
    assert pool_openness(0.0, 0) == 0.0
    assert pool_openness(1.8, 3) == pytest.approx(0.6)


# ------------------------------------------------------------- belt shares


def test_gray_share_matches_beta_cdf():
    # Beta(1,5) CDF: F(x) = 1 - (1-x)^5; at 900/3000 that is 0.83193
    share = rating_share(0.0, 900.0, CFG)
    assert share == pytest.approx(1.0 - 0.7**5, abs=1e-9)


def test_implied_shares_sum_to_one():
    shares = implied_belt_shares(DEFAULT_BELT_TABLE, CFG)
    assert set(shares) == set(DEFAULT_BELT_TABLE.names())
    assert sum(shares.values()) == pytest.approx(1.0, abs=1e-9)
    # the published table understates how gray the population really is
    assert shares["gray"] > 0.8
    assert shares["red"] < 0.01


@pytest.mark.parametrize(
    "admitted,expected",
    [
        (None, 1.0),
        (frozenset({"gray", "green", "blue", "yellow", "red"}), 1.0),
        (frozenset({"green", "blue", "yellow", "red"}), 1.0 / 0.7**5),
        (frozenset({"blue", "yellow", "red"}), 1.0 / 0.6**5),
        (frozenset({"yellow", "red"}), 25.0),  # 1/0.03125 = 32, capped
    ],
)
def test_supply_concentration(admitted, expected):
    value = supply_concentration(DEFAULT_BELT_TABLE, admitted, CFG)
    assert value == pytest.approx(expected, abs=1e-6)


def test_supply_concentration_empty_gate_hits_cap():
    value = supply_concentration(DEFAULT_BELT_TABLE, frozenset({"nobody"}), CFG)
    assert value == CFG.supply_concentration_max
