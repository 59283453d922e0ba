"""Task state machine, belt table semantics, and skill masks."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from csdsim import ConfigError, ModelInvariantError, Task, TaskState
from csdsim.domain import (
    DEFAULT_BELT_TABLE,
    FAILURE_STATES,
    LEGAL_TRANSITIONS,
    TERMINAL_STATES,
    BeltTable,
    PlatformState,
    can_transition,
    mask_to_skills,
    skills_match,
    skills_to_mask,
)

ALL_STATES = list(TaskState)

EXPECTED_EDGES = {
    (TaskState.ARRIVED, TaskState.REGISTERED),
    (TaskState.ARRIVED, TaskState.STARVED),
    (TaskState.REGISTERED, TaskState.SUBMITTED),
    (TaskState.REGISTERED, TaskState.DROPPED),
    (TaskState.SUBMITTED, TaskState.PEER_REVIEW),
    (TaskState.PEER_REVIEW, TaskState.COMPLETED),
    (TaskState.PEER_REVIEW, TaskState.FAILED),
}


def make_task(state=TaskState.ARRIVED) -> Task:
    task = Task(task_id=1, arrival=0.0, duration=5.0, similarity=0.5, award=300.0, skills=0, attractable=True)
    task.state = state
    return task


def test_exactly_seven_legal_edges():
    edges = {(src, dst) for src, dsts in LEGAL_TRANSITIONS.items() for dst in dsts}
    assert edges == EXPECTED_EDGES
    assert len(edges) == 7


def test_terminal_states_have_no_exits():
    assert TERMINAL_STATES == frozenset(
        {TaskState.COMPLETED, TaskState.FAILED, TaskState.STARVED, TaskState.DROPPED}
    )
    for state in TERMINAL_STATES:
        assert LEGAL_TRANSITIONS[state] == frozenset()


def test_failure_states():
    assert FAILURE_STATES == frozenset(
        {TaskState.FAILED, TaskState.STARVED, TaskState.DROPPED}
    )


@pytest.mark.parametrize("src", ALL_STATES)
@pytest.mark.parametrize("dst", ALL_STATES)
def test_transition_agrees_with_edge_set(src, dst):
    task = make_task(src)
    if (src, dst) in EXPECTED_EDGES:
        task.transition(dst)
        assert task.state is dst
    else:
        with pytest.raises(ModelInvariantError):
            task.transition(dst)
        assert task.state is src  # a refused move must not corrupt the task


@given(
    src=st.sampled_from(ALL_STATES),
    dst=st.sampled_from(ALL_STATES),
)
def test_can_transition_matches_table(src, dst):
    assert can_transition(src, dst) == (dst in LEGAL_TRANSITIONS[src])


def test_deadline_is_arrival_plus_duration():
    task = Task(task_id=3, arrival=2.5, duration=10.0, similarity=0.5, award=1.0, skills=0, attractable=True)
    assert task.deadline == 12.5


def test_root_id_defaults_to_task_id():
    task = make_task()
    assert task.root_id == task.task_id
    clone = Task(
        task_id=9, arrival=1.0, duration=2.0, similarity=0.4, award=1.0, skills=0, attractable=True, root_id=1
    )
    assert clone.root_id == 1


# ------------------------------------------------------------------ belts


@pytest.mark.parametrize(
    "rating,belt",
    [
        (0.0, "gray"),
        (899.99, "gray"),
        (900.0, "gray"),  # bounds are inclusive
        (900.01, "green"),
        (1200.0, "green"),
        (1500.0, "blue"),
        (2200.0, "yellow"),
        (2200.01, "red"),
        (3000.0, "red"),
    ],
)
def test_belt_of_boundaries(rating, belt):
    assert DEFAULT_BELT_TABLE.belt_of(rating) == belt


def test_default_p_qualified():
    expected = {"gray": 0.25, "green": 0.45, "blue": 0.39, "yellow": 0.60, "red": 0.60}
    for belt, p in expected.items():
        assert DEFAULT_BELT_TABLE.p_qualified(belt) == p


def test_unknown_belt_raises():
    with pytest.raises(KeyError):
        DEFAULT_BELT_TABLE.p_qualified("purple")


def test_from_rows_renormalizes_shares():
    table = BeltTable.from_rows(
        [("a", 100.0, 0.2, 0.5), ("b", float("inf"), 0.2, 0.5)]
    )
    assert abs(table.share("a") - 0.5) < 1e-12
    assert abs(sum(r.share for r in table.rows) - 1.0) < 1e-12


def test_from_rows_rejects_bounded_tail():
    with pytest.raises(ConfigError):
        BeltTable.from_rows([("a", 100.0, 1.0, 0.5)])


def test_from_rows_rejects_unordered_bounds():
    with pytest.raises(ConfigError):
        BeltTable.from_rows(
            [("a", 200.0, 0.5, 0.5), ("b", 100.0, 0.3, 0.5), ("c", float("inf"), 0.2, 0.5)]
        )


# ------------------------------------------------------------------ skills


def test_skills_mask_round_trip():
    vocab = ("java", "python", "sql")
    mask = skills_to_mask(("sql", "java"), vocab)
    assert mask == 0b101
    assert mask_to_skills(mask, vocab) == ("java", "sql")


def test_unknown_skill_tag_raises():
    with pytest.raises(ConfigError, match="cobol"):
        skills_to_mask(("cobol",), ("java",))


@pytest.mark.parametrize(
    "agent,task,mode,expected",
    [
        (0b011, 0b001, "any", True),
        (0b011, 0b100, "any", False),
        (0b011, 0b011, "all", True),
        (0b011, 0b111, "all", False),
        (0b000, 0b000, "any", True),  # a task with no stated skills takes anyone
        (0b000, 0b000, "all", True),
        (0b000, 0b001, "any", False),
    ],
)
def test_skills_match(agent, task, mode, expected):
    assert skills_match(agent, task, mode) is expected


@given(
    agent=st.integers(min_value=0, max_value=2**10 - 1),
    task=st.integers(min_value=0, max_value=2**10 - 1),
)
def test_skills_match_any_iff_overlap(agent, task):
    assert skills_match(agent, task, "any") == (task == 0 or bool(agent & task))
    assert skills_match(agent, task, "all") == (task & agent == task)


def test_platform_state_snapshot_keys():
    snap = PlatformState().snapshot()
    assert tuple(snap) == (
        "arrived",
        "registered",
        "submitted",
        "completed",
        "failed",
        "starved",
        "dropped",
        "failed_review",
        "reposted",
    )
    assert all(v == 0 for v in snap.values())
