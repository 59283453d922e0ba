"""Core domain model: task lifecycle states, belts, tasks, agents, counters."""

from __future__ import annotations

import csv
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .config import ConfigError, RunConfig


class ModelInvariantError(Exception):
    """A structural rule of the model was broken at runtime."""


class TaskState(str, Enum):
    """Lifecycle states of a posted task."""

    ARRIVED = "arrived"
    """Posted and open for registration, no registrant yet."""

    REGISTERED = "registered"
    """Has at least one registrant, no submission yet."""

    SUBMITTED = "submitted"
    """Has at least one submission; registration is closed."""

    PEER_REVIEW = "peer_review"
    """Deadline passed with submissions in hand; scoring in progress."""

    COMPLETED = "completed"
    """A qualified submission won. Terminal."""

    FAILED = "failed"
    """Reviewed but no submission qualified. Terminal."""

    STARVED = "starved"
    """Deadline passed with zero registrants. Terminal."""

    DROPPED = "dropped"
    """Deadline passed with registrants but zero submissions. Terminal."""


# The only legal edges. Everything else is a modelling bug.
LEGAL_TRANSITIONS = {
    TaskState.ARRIVED: frozenset({TaskState.REGISTERED, TaskState.STARVED}),
    TaskState.REGISTERED: frozenset({TaskState.SUBMITTED, TaskState.DROPPED}),
    TaskState.SUBMITTED: frozenset({TaskState.PEER_REVIEW}),
    TaskState.PEER_REVIEW: frozenset({TaskState.COMPLETED, TaskState.FAILED}),
    TaskState.COMPLETED: frozenset(),
    TaskState.FAILED: frozenset(),
    TaskState.STARVED: frozenset(),
    TaskState.DROPPED: frozenset(),
}

TERMINAL_STATES = frozenset(
    s for s, nxt in LEGAL_TRANSITIONS.items() if not nxt
)

# Registration stays open only until the first submission lands.
REGISTRABLE_STATES = frozenset({TaskState.ARRIVED, TaskState.REGISTERED})

# States in which a registrant may still submit work.
SUBMITTABLE_STATES = frozenset({TaskState.REGISTERED, TaskState.SUBMITTED})

FAILURE_STATES = frozenset({TaskState.FAILED, TaskState.STARVED, TaskState.DROPPED})


def is_terminal(state: TaskState) -> bool:
    return state in TERMINAL_STATES


def can_transition(current: TaskState, target: TaskState) -> bool:
    return target in LEGAL_TRANSITIONS[current]


@dataclass(frozen=True)
class BeltRow:
    """One competence tier: rating interval, population share, quality odds."""

    belt: str
    upper_bound: float  # inclusive; a rating on the boundary stays in this belt
    share: float
    p_qualified: float


@dataclass(frozen=True)
class BeltTable:
    rows: tuple

    @classmethod
    def from_rows(cls, rows) -> "BeltTable":
        """Build a table from (belt, upper, share, p) rows, renormalizing shares.

        Rows must be sorted by ascending upper bound and end with an unbounded
        belt; published shares may not sum exactly to one.
        """
        rows = [BeltRow(*r) if not isinstance(r, BeltRow) else r for r in rows]
        if not rows:
            raise ConfigError("belt table: no rows")
        bounds = [r.upper_bound for r in rows]
        if bounds != sorted(bounds):
            raise ConfigError("belt table: rows must be sorted by upper_bound")
        if not math.isinf(rows[-1].upper_bound):
            raise ConfigError("belt table: last row must have an unbounded rating")
        total = sum(r.share for r in rows)
        if total <= 0:
            raise ConfigError("belt table: shares must sum to a positive value")
        normed = tuple(
            BeltRow(r.belt, r.upper_bound, r.share / total, r.p_qualified)
            for r in rows
        )
        for r in normed:
            if not (0.0 <= r.p_qualified <= 1.0):
                raise ConfigError(f"belt table: p_qualified out of range for {r.belt}")
        return cls(rows=normed)

    def belt_of(self, rating: float) -> str:
        for row in self.rows:
            if rating <= row.upper_bound:
                return row.belt
        return self.rows[-1].belt  # unreachable with an unbounded last row

    def p_qualified(self, belt: str) -> float:
        for row in self.rows:
            if row.belt == belt:
                return row.p_qualified
        raise KeyError(belt)

    def share(self, belt: str) -> float:
        for row in self.rows:
            if row.belt == belt:
                return row.share
        raise KeyError(belt)

    def names(self) -> tuple:
        return tuple(r.belt for r in self.rows)


DEFAULT_BELT_TABLE = BeltTable.from_rows(
    [
        ("gray", 900.0, 0.9002, 0.25),
        ("green", 1200.0, 0.0288, 0.45),
        ("blue", 1500.0, 0.0539, 0.39),
        ("yellow", 2200.0, 0.0154, 0.60),
        ("red", math.inf, 0.0016, 0.60),
    ]
)


def load_belt_table(path: str) -> BeltTable:
    """Load a belt table CSV: belt,upper_bound,share,p_qualified.

    An empty upper_bound cell marks the unbounded top belt.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            required = {"belt", "upper_bound", "share", "p_qualified"}
            if reader.fieldnames is None or not required.issubset(reader.fieldnames):
                raise ConfigError(
                    f"belt table {path}: header must contain {', '.join(sorted(required))}"
                )
            rows = []
            for rec in reader:
                raw_bound = (rec["upper_bound"] or "").strip()
                bound = math.inf if not raw_bound else float(raw_bound)
                rows.append(
                    (
                        rec["belt"].strip(),
                        bound,
                        float(rec["share"]),
                        float(rec["p_qualified"]),
                    )
                )
    except OSError as exc:
        raise ConfigError(f"cannot read belt table {path}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"belt table {path}: bad numeric cell: {exc}") from None
    return BeltTable.from_rows(rows)


def resolve_belt_table(cfg: RunConfig) -> BeltTable:
    if cfg.belt_table_path:
        return load_belt_table(cfg.belt_table_path)
    return DEFAULT_BELT_TABLE


def skills_to_mask(tags, vocabulary) -> int:
    """Encode a tag collection as a bitmask over the configured vocabulary."""
    index = {tag: i for i, tag in enumerate(vocabulary)}
    mask = 0
    for tag in tags:
        try:
            mask |= 1 << index[tag]
        except KeyError:
            raise ConfigError(f"unknown skill tag: {tag}") from None
    return mask


def mask_to_skills(mask: int, vocabulary) -> tuple:
    return tuple(tag for i, tag in enumerate(vocabulary) if mask >> i & 1)


def skills_match(agent_mask: int, task_mask: int, mode: str) -> bool:
    """A task with no stated requirements welcomes every skill set."""
    if task_mask == 0:
        return True
    if mode == "all":
        return agent_mask & task_mask == task_mask
    return agent_mask & task_mask != 0


@dataclass(frozen=True)
class Submission:
    agent_id: int
    time: float
    score: float
    qualified: bool


@dataclass
class Task:
    """One posted task: immutable content plus mutable lifecycle bookkeeping."""

    task_id: int
    arrival: float
    duration: float
    similarity: float
    award: float
    skills: int
    attractable: bool
    repost_count: int = 0
    root_id: int = -1
    focal: bool = False
    state: TaskState = TaskState.ARRIVED
    registrants: list = field(default_factory=list)
    submissions: list = field(default_factory=list)
    prediction: float = 0.0
    winner: Optional[int] = None
    failure_phase: Optional[str] = None

    def __post_init__(self):
        if self.root_id < 0:
            self.root_id = self.task_id

    @property
    def deadline(self) -> float:
        return self.arrival + self.duration

    def transition(self, target: TaskState) -> None:
        if not can_transition(self.state, target):
            raise ModelInvariantError(
                f"task {self.task_id}: illegal transition {self.state.value} -> {target.value}"
            )
        self.state = target


@dataclass
class Agent:
    """One crowd member with a fixed rating and a rolling reliability record."""

    agent_id: int
    arrival: float
    rating: float
    belt: str
    skills: int
    recent_outcomes: deque = field(default_factory=lambda: deque(maxlen=15))
    open_list: list = field(default_factory=list)
    wins: int = 0
    submissions_made: int = 0
    # event-loop process state, owned by the engine
    pending: list = field(default_factory=list)
    sub_armed: bool = False
    reg_rng: object = None
    sub_rng: object = None
    quality_rng: object = None

    @property
    def reliability(self) -> float:
        """Qualified fraction over the recent registration outcomes window."""
        if not self.recent_outcomes:
            return 0.0
        return sum(self.recent_outcomes) / len(self.recent_outcomes)


@dataclass
class PlatformState:
    """Monotone task-level tallies feeding the platform health ratios.

    ``failed_total`` counts reviewed-but-unqualified plus dropped tasks;
    starvation is tallied separately so completed + failed never exceeds
    registered. Failure reports add the starved count back in.
    """

    arrived_total: int = 0
    registered_total: int = 0
    submitted_total: int = 0
    completed_total: int = 0
    failed_total: int = 0
    starved_total: int = 0
    dropped_total: int = 0
    failed_review_total: int = 0
    reposted_total: int = 0

    def snapshot(self) -> dict:
        return {
            "arrived": self.arrived_total,
            "registered": self.registered_total,
            "submitted": self.submitted_total,
            "completed": self.completed_total,
            "failed": self.failed_total,
            "starved": self.starved_total,
            "dropped": self.dropped_total,
            "failed_review": self.failed_review_total,
            "reposted": self.reposted_total,
        }
