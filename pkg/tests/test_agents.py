"""Agent decision rules: registration, submission, scoring, winners."""

from collections import deque

import pytest
from hypothesis import given
from hypothesis import strategies as st

from csdsim import Agent, RunConfig, Task, TaskState
from csdsim.agents import (
    REASON_ALREADY_REGISTERED,
    REASON_BELT_EXCLUDED,
    REASON_NOT_REGISTRABLE,
    REASON_OPEN_LIST_FULL,
    REASON_SKILL_MISMATCH,
    REASON_ZERO_RATING,
    decide_register,
    decide_submit,
    determine_winner,
    pool_crowding_factor,
    preference_weight,
    registration_engagement,
    registration_preconditions,
    score_submission,
    submission_crowd_suppression,
    update_reliability,
)
from csdsim.domain import Submission

CFG = RunConfig()


def make_agent(**kw) -> Agent:
    defaults = dict(
        agent_id=1,
        arrival=0.0,
        rating=500.0,
        belt="gray",
        skills=0b1,
        recent_outcomes=deque(maxlen=15),
    )
    defaults.update(kw)
    return Agent(**defaults)


def make_task(**kw) -> Task:
    defaults = dict(
        task_id=10,
        arrival=0.0,
        duration=5.0,
        similarity=0.5,
        award=400.0,
        skills=0b1,
        attractable=True,
    )
    defaults.update(kw)
    return Task(**defaults)


# ------------------------------------------------------------- registration


@pytest.mark.parametrize(
    "count,draw,crowd_draw,expected",
    [
        (0, 0.95, 1.0, True),
        (17, 0.80, 0.99, True),  # threshold is inclusive
        (17, 0.79, 0.00, False),
        (18, 0.00, 0.29, True),  # over the cap only the crowd draw matters
        (18, 0.99, 0.30, False),
        (30, 0.99, 0.10, True),
    ],
)
def test_decide_register_pinned_rows(count, draw, crowd_draw, expected):
    assert decide_register(count, draw, crowd_draw) is expected


@given(
    count=st.integers(min_value=0, max_value=17),
    draw=st.floats(min_value=0, max_value=1),
    crowd_a=st.floats(min_value=0, max_value=1),
    crowd_b=st.floats(min_value=0, max_value=1),
)
def test_under_cap_ignores_crowd_draw(count, draw, crowd_a, crowd_b):
    assert decide_register(count, draw, crowd_a) == decide_register(count, draw, crowd_b)


@given(
    count=st.integers(min_value=18, max_value=200),
    draw_a=st.floats(min_value=0, max_value=1),
    draw_b=st.floats(min_value=0, max_value=1),
    crowd=st.floats(min_value=0, max_value=1),
)
def test_over_cap_ignores_interest_draw(count, draw_a, draw_b, crowd):
    assert decide_register(count, draw_a, crowd) == decide_register(count, draw_b, crowd)


def test_registration_preconditions_reason_codes():
    cfg = CFG
    agent = make_agent()
    task = make_task()
    assert registration_preconditions(agent, task, cfg) is None

    done = make_task()
    done.state = TaskState.COMPLETED
    assert registration_preconditions(agent, done, cfg) == REASON_NOT_REGISTRABLE

    assert (
        registration_preconditions(agent, task, cfg, admitted=frozenset({"red"}))
        == REASON_BELT_EXCLUDED
    )

    full = make_agent(open_list=[1, 2, 3, 4, 5])
    assert registration_preconditions(full, task, cfg) == REASON_OPEN_LIST_FULL

    novice = make_agent(rating=0.0)
    assert registration_preconditions(novice, task, cfg) == REASON_ZERO_RATING

    mismatched = make_agent(skills=0b10)
    assert registration_preconditions(mismatched, task, cfg) == REASON_SKILL_MISMATCH

    repeat = make_agent(open_list=[task.task_id])
    assert registration_preconditions(repeat, task, cfg) == REASON_ALREADY_REGISTERED


def test_preference_weight_novelty_branch():
    # similarity 0.3 and no rebound belt: plain novelty curve
    expected = (1.0 - 0.3) ** CFG.novelty_exponent
    assert preference_weight(0.3, "blue", CFG) == pytest.approx(expected, abs=1e-12)


def test_preference_weight_familiarity_rebound():
    # at high similarity the rebound term dominates for newcomer belts only
    s = 0.98
    novelty = (1.0 - s) ** CFG.novelty_exponent
    rebound = CFG.familiarity_gain * (s - CFG.familiarity_pivot)
    assert rebound > novelty
    assert preference_weight(s, "gray", CFG) == pytest.approx(rebound, abs=1e-12)
    assert preference_weight(s, "green", CFG) == pytest.approx(rebound, abs=1e-12)
    assert preference_weight(s, "blue", CFG) == pytest.approx(novelty, abs=1e-12)


def test_preference_weight_rebound_inactive_below_pivot():
    s = CFG.familiarity_pivot - 0.1
    assert preference_weight(s, "gray", CFG) == pytest.approx(
        (1.0 - s) ** CFG.novelty_exponent, abs=1e-12
    )


@given(
    similarity=st.floats(min_value=0, max_value=1),
    other=st.floats(min_value=0, max_value=1),
    belt=st.sampled_from(["gray", "green", "blue", "yellow", "red"]),
    concentration=st.floats(min_value=1, max_value=25),
)
def test_engagement_is_a_probability(similarity, other, belt, concentration):
    p = registration_engagement(similarity, other, belt, concentration, CFG)
    assert 0.0 <= p <= 1.0


def test_pool_crowding_factor_floor():
    import dataclasses

    assert pool_crowding_factor(1.0, 1.0, CFG) == pytest.approx(0.5)
    crowded = dataclasses.replace(CFG, pool_crowding_coeff=2.0)
    assert pool_crowding_factor(1.0, 1.0, crowded) == 0.0  # clamped, never negative


# --------------------------------------------------------------- submission


@pytest.mark.parametrize(
    "p_belt,draw,expected",
    [
        (0.25, 0.10, True),  # gray: 0.025 < 0.051
        (0.60, 0.10, False),  # red: 0.060 is not
        (0.45, 0.10, True),  # green: 0.045
        (0.25, 0.204, False),  # 0.051 exactly: the gate is strict
        (0.25, 0.2039, True),
    ],
)
def test_decide_submit_pinned_rows(p_belt, draw, expected):
    assert decide_submit(draw, p_belt, CFG.sub_product_threshold) is expected


@given(
    draw=st.floats(min_value=0, max_value=1),
    p=st.floats(min_value=0.01, max_value=1),
)
def test_decide_submit_matches_product_rule(draw, p):
    assert decide_submit(draw, p, 0.051) == (draw * p < 0.051)


def test_submission_crowd_suppression_disabled_by_default():
    for n in (0, 18, 50, 500):
        assert submission_crowd_suppression(n, CFG) == 1.0


def test_submission_crowd_suppression_when_enabled():
    import dataclasses

    cfg = dataclasses.replace(CFG, crowd_penalty_coeff=0.5)
    assert submission_crowd_suppression(18, cfg) == 1.0
    assert submission_crowd_suppression(20, cfg) == pytest.approx(0.5)
    assert submission_crowd_suppression(17, cfg) == 1.0


def test_score_submission_boundary():
    assert score_submission(0.75, 75.0) == (75.0, True)
    score, qualified = score_submission(0.7499, 75.0)
    assert score == pytest.approx(74.99)
    assert not qualified
    assert score_submission(0.0, 75.0) == (0.0, False)
    assert score_submission(1.0, 75.0) == (100.0, True)


# ------------------------------------------------------------------ winners


def test_winner_best_qualified_score():
    subs = [
        Submission(1, 2.0, 80.0, True),
        Submission(2, 1.0, 92.0, True),
        Submission(3, 0.5, 99.0, False),  # unqualified, ignored
    ]
    assert determine_winner(subs).agent_id == 2


def test_winner_tie_goes_to_earliest():
    subs = [
        Submission(1, 2.0, 92.0, True),
        Submission(2, 1.0, 92.0, True),
    ]
    assert determine_winner(subs).agent_id == 2


def test_winner_none_without_qualified():
    assert determine_winner([]) is None
    assert determine_winner([Submission(1, 1.0, 30.0, False)]) is None


@given(
    st.lists(
        st.tuples(
            st.integers(min_value=1, max_value=50),
            st.floats(min_value=0, max_value=10),
            st.floats(min_value=0, max_value=100),
            st.booleans(),
        ),
        max_size=12,
    )
)
def test_winner_is_order_independent(rows):
    subs = [Submission(a, t, s, q) for a, t, s, q in rows]
    forward = determine_winner(subs)
    backward = determine_winner(list(reversed(subs)))
    if forward is None:
        assert backward is None
    else:
        assert backward is not None
        assert (forward.score, forward.time) == (backward.score, backward.time)


# -------------------------------------------------------------- reliability


def test_reliability_window_evicts_oldest():
    agent = make_agent()
    for _ in range(15):
        update_reliability(agent, False)
    assert agent.reliability == 0.0
    for _ in range(5):
        update_reliability(agent, True)
    # window now holds 10 misses and 5 hits
    assert agent.reliability == pytest.approx(5 / 15)
    assert len(agent.recent_outcomes) == 15


def test_reliability_empty_is_zero():
    assert make_agent().reliability == 0.0
