"""Discrete-event core: clock, future event list, RNG streams, one replication.

Determinism contract: a run is a pure function of the config. All randomness
flows through named substreams of the master seed, events tie-break FIFO by
insertion order, and nothing fires past the horizon. Two runs with the same
config produce byte-identical outputs and equal trace hashes.
"""

from __future__ import annotations

import hashlib
import heapq
import random
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .agents import (
    decide_register,
    decide_submit,
    registration_engagement,
    registration_preconditions,
    score_submission,
    submission_crowd_suppression,
    update_reliability,
)
from .config import RunConfig, follow_through_by_belt
from .domain import (
    Agent,
    BeltTable,
    FAILURE_STATES,
    ModelInvariantError,
    PlatformState,
    SUBMITTABLE_STATES,
    Submission,
    Task,
    TaskState,
    resolve_belt_table,
)
from .lifecycle import (
    compute_fpr,
    compute_fps,
    compute_tcr,
    compute_tfr,
    compute_tsr,
    repost,
    resolve_review,
    sample_duration,
)
from .platform import (
    arrival_count,
    pool_openness,
    sample_award,
    sample_similarity,
    spawn_agent,
    supply_concentration,
    sample_skill_mask,
    utilization,
)

# Event kinds, in no particular order; FIFO sequencing handles same-time ties.
EV_TASK_ARRIVAL = "task_arrival"
EV_AGENT_START = "agent_start"
EV_REG_ATTEMPT = "reg_attempt"
EV_SUB_ATTEMPT = "sub_attempt"
EV_DEADLINE = "deadline"
EV_REVIEW = "review"
EV_FOCAL = "focal"
EV_DAILY = "daily"


class SimClock:
    """Monotone clock in fractional days."""

    __slots__ = ("now", "horizon")

    def __init__(self, horizon: float):
        self.now = 0.0
        self.horizon = horizon

    def advance(self, t: float) -> None:
        if t < self.now:
            raise ModelInvariantError(f"clock moved backwards: {self.now} -> {t}")
        self.now = t


class FutureEventList:
    """Min-heap of (time, seq, kind, subject); seq gives FIFO ties."""

    __slots__ = ("_heap", "_seq", "horizon")

    def __init__(self, horizon: float):
        self._heap = []
        self._seq = 0
        self.horizon = horizon

    def push(self, time: float, kind: str, subject: int) -> bool:
        # nothing is allowed to fire past the horizon
        if time > self.horizon:
            return False
        heapq.heappush(self._heap, (time, self._seq, kind, subject))
        self._seq += 1
        return True

    def pop(self):
        return heapq.heappop(self._heap)

    def __len__(self):
        return len(self._heap)


class RngStreams:
    """Named deterministic substreams derived from one master seed.

    String seeding keeps substreams independent: extra draws on one stream
    never shift any other, which is what keeps paired runs comparable.
    """

    def __init__(self, seed: int):
        self.seed = seed
        self._streams = {}

    def get(self, name: str) -> random.Random:
        rng = self._streams.get(name)
        if rng is None:
            rng = random.Random(f"{self.seed}/{name}")
            self._streams[name] = rng
        return rng


@dataclass
class ReplicationResult:
    """Everything one replication hands back to reporting and scenarios."""

    seed: int
    counters: dict
    in_flight: int
    resolved: int
    reported_failures: int
    focal: Optional[dict]
    daily: list
    predictions: list
    latest_prediction: dict
    task_log: list
    reg_by_belt: Counter
    sub_by_belt: Counter
    trace_hash: str
    events_processed: int

    @property
    def success_ratio(self) -> float:
        if self.resolved <= 0:
            return 0.0
        return self.counters["completed"] / self.resolved

    @property
    def unqualified_ratio(self) -> float:
        if self.resolved <= 0:
            return 0.0
        return self.counters["failed_review"] / self.resolved

    @property
    def zero_submission_ratio(self) -> float:
        if self.resolved <= 0:
            return 0.0
        return (self.counters["dropped"] + self.counters["starved"]) / self.resolved


class Simulation:
    """One replication of the marketplace under a fixed config."""

    def __init__(self, cfg: RunConfig, belt_table: Optional[BeltTable] = None):
        self.cfg = cfg
        self.belt_table = belt_table if belt_table is not None else resolve_belt_table(cfg)
        self.streams = RngStreams(cfg.seed)
        self.clock = SimClock(cfg.horizon_days)
        self.fel = FutureEventList(cfg.horizon_days)
        self.state = PlatformState()
        self.tasks: dict = {}
        self.agents: dict = {}
        self.active: list = []
        self.pool: list = []
        self._pool_pos: dict = {}
        self.pool_sim_sum = 0.0
        self.admitted = frozenset(cfg.admitted_belts) if cfg.admitted_belts else None
        self.concentration = supply_concentration(self.belt_table, self.admitted, cfg)
        self.scan_count = max(1, round(self.concentration))
        self.follow_through = follow_through_by_belt(cfg)
        self.p_qual = {row.belt: row.p_qualified for row in self.belt_table.rows}
        self.predictions: list = []
        self.latest_prediction: dict = {}
        self.task_log: list = []
        self.daily: list = []
        self.reg_by_belt: Counter = Counter()
        self.sub_by_belt: Counter = Counter()
        self.transition_counts: Counter = Counter()
        self.focal_id: Optional[int] = None
        self.focal_result: Optional[dict] = None
        self.focal_reg_by_belt: Counter = Counter()
        self.focal_sub_by_belt: Counter = Counter()
        self._next_task_id = 0
        self._resolved = 0
        self._trace = hashlib.blake2b(digest_size=16)
        self._events = 0

    # ------------------------------------------------------------- setup

    def _take_task_id(self) -> int:
        tid = self._next_task_id
        self._next_task_id += 1
        return tid

    def _draw_ambient_tasks(self) -> None:
        arrival_rng = self.streams.get("task-arrival")
        count = arrival_count(arrival_rng, self.cfg.task_lambda, self.cfg)
        arrivals = [self.cfg.horizon_days * arrival_rng.random() for _ in range(count)]
        sim_rng = self.streams.get("similarity")
        dur_rng = self.streams.get("duration")
        award_rng = self.streams.get("award")
        attr_rng = self.streams.get("attraction")
        skill_rng = self.streams.get("skills")
        for when in arrivals:
            task = Task(
                task_id=self._take_task_id(),
                arrival=when,
                duration=sample_duration(dur_rng, self.cfg),
                similarity=sample_similarity(sim_rng, self.cfg),
                award=sample_award(award_rng, self.cfg),
                skills=sample_skill_mask(
                    skill_rng,
                    self.cfg.task_skills_min,
                    self.cfg.task_skills_max,
                    self.cfg.skill_vocabulary,
                ),
                attractable=attr_rng.random() < self.cfg.attraction_rate,
            )
            self.tasks[task.task_id] = task
            self.schedule(when, EV_TASK_ARRIVAL, task.task_id)

    def _draw_population(self) -> None:
        arrival_rng = self.streams.get("agent-arrival")
        count = arrival_count(arrival_rng, self.cfg.agent_gamma, self.cfg)
        arrivals = [self.cfg.horizon_days * arrival_rng.random() for _ in range(count)]
        exp_rng = self.streams.get("experience")
        skill_rng = self.streams.get("skills")
        for aid, when in enumerate(arrivals):
            agent = spawn_agent(aid, when, exp_rng, skill_rng, self.cfg, self.belt_table)
            agent.reg_rng = self.streams.get(f"registration/{aid}")
            agent.sub_rng = self.streams.get(f"submission/{aid}")
            agent.quality_rng = self.streams.get(f"quality/{aid}")
            self.agents[aid] = agent
            self.schedule(when, EV_AGENT_START, aid)

    def setup(self) -> None:
        self._draw_ambient_tasks()
        self._draw_population()
        if self.cfg.focal_enabled:
            self.schedule(self.cfg.focal_arrival, EV_FOCAL, 0)
        day = 1
        while day <= self.cfg.horizon_days:
            self.schedule(float(day), EV_DAILY, day)
            day += 1

    # ------------------------------------------------------------- plumbing

    def schedule(self, time: float, kind: str, subject: int) -> bool:
        if time < self.clock.now:
            raise ModelInvariantError(
                f"event {kind} scheduled in the past: {time} < {self.clock.now}"
            )
        return self.fel.push(time, kind, subject)

    def _pool_add(self, task: Task) -> None:
        self._pool_pos[task.task_id] = len(self.pool)
        self.pool.append(task.task_id)
        self.pool_sim_sum += task.similarity

    def _pool_remove(self, task_id: int) -> None:
        pos = self._pool_pos.pop(task_id, None)
        if pos is None:
            return
        last = self.pool.pop()
        if last != task_id:
            self.pool[pos] = last
            self._pool_pos[last] = pos
        self.pool_sim_sum -= self.tasks[task_id].similarity

    def current_tsr(self) -> float:
        return compute_tsr(self.state.submitted_total, self.state.registered_total)

    def current_fps(self) -> float:
        return compute_fps(self.current_tsr(), self.cfg.fps_slope, self.cfg.fps_intercept)

    def _record_prediction(self, task: Task, phase: str, value: float) -> None:
        task.prediction = value
        self.predictions.append((task.task_id, self.clock.now, phase, value))
        self.latest_prediction[(task.task_id, phase)] = value

    # ------------------------------------------------------------- handlers

    def _on_task_arrival(self, tid: int) -> None:
        task = self.tasks[tid]
        self.state.arrived_total += 1
        if task.attractable:
            self._pool_add(task)
        self.schedule(task.deadline, EV_DEADLINE, tid)

    def _on_agent_start(self, aid: int) -> None:
        agent = self.agents[aid]
        self.active.append(aid)
        gap = agent.reg_rng.expovariate(self.cfg.reg_rate_per_day)
        self.schedule(self.clock.now + gap, EV_REG_ATTEMPT, aid)

    def _on_reg_attempt(self, aid: int) -> None:
        agent = self.agents[aid]
        rng = agent.reg_rng
        # keep the cycle alive first so the per-attempt draw order is stable
        gap = rng.expovariate(self.cfg.reg_rate_per_day)
        self.schedule(self.clock.now + gap, EV_REG_ATTEMPT, aid)
        for _ in range(self.scan_count):
            size = len(self.pool)
            if size == 0:
                return
            task = self.tasks[self.pool[int(rng.random() * size)]]
            if registration_preconditions(agent, task, self.cfg, self.admitted) is not None:
                continue
            if size > 1:
                mean_other = (self.pool_sim_sum - task.similarity) / (size - 1)
            else:
                mean_other = 0.0
            p_engage = registration_engagement(
                task.similarity, mean_other, agent.belt, self.concentration, self.cfg
            )
            if rng.random() >= p_engage:
                continue
            draw = rng.random()
            crowd_draw = rng.random()
            if decide_register(
                len(task.registrants),
                draw,
                crowd_draw,
                threshold=self.cfg.reg_threshold,
                competition_cap=self.cfg.competition_cap,
                crowded_p=self.cfg.crowded_bernoulli_p,
            ):
                self._register(agent, task)
                return

    def _move(self, task: Task, new_state: TaskState) -> None:
        """Route every state change through one audited chokepoint."""
        self.transition_counts[(task.state, new_state)] += 1
        task.transition(new_state)

    def _register(self, agent: Agent, task: Task) -> None:
        if not task.registrants:
            self._move(task, TaskState.REGISTERED)
            self.state.registered_total += 1
        task.registrants.append(agent.agent_id)
        agent.open_list.append(task.task_id)
        if self.cfg.check_invariants and len(agent.open_list) > self.cfg.open_list_cap:
            raise ModelInvariantError(
                f"agent {agent.agent_id} exceeded the open list cap"
            )
        agent.pending.append(task.task_id)
        self.reg_by_belt[agent.belt] += 1
        if task.focal:
            self.focal_reg_by_belt[agent.belt] += 1
        fpr = compute_fpr(
            (self.agents[a].reliability, self.p_qual[self.agents[a].belt])
            for a in task.registrants
        )
        self._record_prediction(task, "registration", fpr)
        if not agent.sub_armed:
            gap = agent.sub_rng.expovariate(self.cfg.sub_rate_per_day)
            self.schedule(self.clock.now + gap, EV_SUB_ATTEMPT, agent.agent_id)
            agent.sub_armed = True

    def _on_sub_attempt(self, aid: int) -> None:
        agent = self.agents[aid]
        if not agent.pending:
            agent.sub_armed = False
            return
        rng = agent.sub_rng
        gap = rng.expovariate(self.cfg.sub_rate_per_day)
        self.schedule(self.clock.now + gap, EV_SUB_ATTEMPT, aid)
        # one-shot: whichever task is picked is decided now, submit or not
        index = int(rng.random() * len(agent.pending))
        task = self.tasks[agent.pending.pop(index)]
        if task.state not in SUBMITTABLE_STATES or self.clock.now >= task.deadline:
            return
        if rng.random() >= self.follow_through[agent.belt]:
            return
        if rng.random() >= submission_crowd_suppression(len(task.registrants), self.cfg):
            return
        if decide_submit(rng.random(), self.p_qual[agent.belt], self.cfg.sub_product_threshold):
            self._submit(agent, task)

    def _submit(self, agent: Agent, task: Task) -> None:
        if self.cfg.check_invariants and agent.agent_id not in task.registrants:
            raise ModelInvariantError(
                f"agent {agent.agent_id} submitted to task {task.task_id} without registering"
            )
        if not task.submissions:
            self._move(task, TaskState.SUBMITTED)
            self.state.submitted_total += 1
            self._pool_remove(task.task_id)  # registration closes with the first submission
        score, qualified = score_submission(agent.quality_rng.random(), self.cfg.quality_pass)
        task.submissions.append(Submission(agent.agent_id, self.clock.now, score, qualified))
        agent.submissions_made += 1
        self.sub_by_belt[agent.belt] += 1
        if task.focal:
            self.focal_sub_by_belt[agent.belt] += 1
        self._record_prediction(task, "submission", self.current_fps())

    def _on_deadline(self, tid: int) -> None:
        task = self.tasks[tid]
        if task.state is TaskState.ARRIVED:
            self._move(task, TaskState.STARVED)
            task.failure_phase = "registration"
            self.state.starved_total += 1
            self._finalize(task)
        elif task.state is TaskState.REGISTERED:
            self._move(task, TaskState.DROPPED)
            task.failure_phase = "registration"
            self.state.dropped_total += 1
            self.state.failed_total += 1
            self._finalize(task)
        elif task.state is TaskState.SUBMITTED:
            self._move(task, TaskState.PEER_REVIEW)
            self.schedule(self.clock.now, EV_REVIEW, tid)
        else:
            raise ModelInvariantError(
                f"deadline fired on task {tid} in state {task.state.value}"
            )

    def _on_review(self, tid: int) -> None:
        task = self.tasks[tid]
        before = task.state
        winner = resolve_review(task)
        self.transition_counts[(before, task.state)] += 1
        if winner is not None:
            self.state.completed_total += 1
            self.agents[winner.agent_id].wins += 1
        else:
            self.state.failed_review_total += 1
            self.state.failed_total += 1
        self._finalize(task)

    def _finalize(self, task: Task) -> None:
        """Terminal housekeeping: pool, agent books, logs, repost, checks."""
        self._pool_remove(task.task_id)
        self._resolved += 1
        qualified_by = {s.agent_id for s in task.submissions if s.qualified}
        for aid in task.registrants:
            agent = self.agents[aid]
            agent.open_list.remove(task.task_id)
            if task.task_id in agent.pending:
                agent.pending.remove(task.task_id)
            update_reliability(agent, aid in qualified_by)
        if task.focal:
            self._record_focal(task)
        self.task_log.append(self._log_row(task))
        if (
            self.cfg.repost_failed
            and task.state in FAILURE_STATES
            and not task.focal
            and task.repost_count < self.cfg.repost_max
            and self.clock.now < self.cfg.horizon_days
        ):
            attr_rng = self.streams.get("attraction")
            clone = repost(
                task,
                self.clock.now,
                self._take_task_id(),
                attr_rng.random() < self.cfg.attraction_rate,
            )
            self.tasks[clone.task_id] = clone
            self.state.reposted_total += 1
            self.schedule(self.clock.now, EV_TASK_ARRIVAL, clone.task_id)
        if self.cfg.check_invariants:
            self._check_counters()

    def _record_focal(self, task: Task) -> None:
        self.focal_result = {
            "task_id": task.task_id,
            "outcome": task.state.value,
            "failed": task.state in FAILURE_STATES,
            "similarity": task.similarity,
            "registrants": len(task.registrants),
            "submissions": len(task.submissions),
            "reg_by_belt": Counter(self.focal_reg_by_belt),
            "sub_by_belt": Counter(self.focal_sub_by_belt),
            "final_fpr": self.latest_prediction.get((task.task_id, "registration"), 0.0),
            "final_fps": self.latest_prediction.get((task.task_id, "submission"), 0.0),
            "resolved_at": self.clock.now,
        }

    def _log_row(self, task: Task) -> dict:
        return {
            "task_id": task.task_id,
            "root_id": task.root_id,
            "posted_day": task.arrival,
            "duration_days": task.duration,
            "similarity": task.similarity,
            "registrants": len(task.registrants),
            "submissions": len(task.submissions),
            "outcome": task.state.value,
            "failure_phase": task.failure_phase or "",
            "repost_count": task.repost_count,
            "focal": task.focal,
            "tsr_at_resolution": self.current_tsr(),
        }

    def _check_counters(self) -> None:
        s = self.state
        if s.completed_total + s.failed_total > s.registered_total:
            raise ModelInvariantError("completed + failed exceeded registered")
        if s.submitted_total > s.registered_total:
            raise ModelInvariantError("submitted exceeded registered")
        if s.failed_total != s.dropped_total + s.failed_review_total:
            raise ModelInvariantError("failed counter out of sync with its parts")

    def _on_focal(self, _subject: int) -> None:
        if self.cfg.openness_gate is not None:
            similarity = self.cfg.openness_gate
        else:
            similarity = pool_openness(self.pool_sim_sum, len(self.pool))
            if similarity <= 0.0:
                similarity = (self.cfg.similarity_low + self.cfg.similarity_high) / 2.0
        task = Task(
            task_id=self._take_task_id(),
            arrival=self.clock.now,
            duration=self.cfg.focal_duration,
            similarity=similarity,
            award=self.cfg.focal_award,
            skills=0,  # no stated requirements: every skill set is welcome
            attractable=True,
            focal=True,
        )
        self.tasks[task.task_id] = task
        self.focal_id = task.task_id
        self.schedule(self.clock.now, EV_TASK_ARRIVAL, task.task_id)

    def _on_daily(self, day: int) -> None:
        busy = sum(1 for aid in self.active if self.agents[aid].open_list)
        total = len(self.active)
        s = self.state
        self.daily.append(
            {
                **s.snapshot(),  # cumulative counters ride along; the CSV ignores them
                "day": day,
                "open_tasks": s.arrived_total - self._resolved,
                "tcr": compute_tcr(s.completed_total, s.registered_total),
                "tfr": compute_tfr(s.completed_total, s.registered_total),
                "tsr": compute_tsr(
                    s.submitted_total, s.registered_total, invert=self.cfg.invert_tsr
                ),
                "utilization": utilization(busy, total),
                "pool_openness": pool_openness(self.pool_sim_sum, len(self.pool)),
                "busy_agents": busy,
                "total_agents": total,
            }
        )

    # ------------------------------------------------------------- run

    _HANDLERS = {
        EV_TASK_ARRIVAL: "_on_task_arrival",
        EV_AGENT_START: "_on_agent_start",
        EV_REG_ATTEMPT: "_on_reg_attempt",
        EV_SUB_ATTEMPT: "_on_sub_attempt",
        EV_DEADLINE: "_on_deadline",
        EV_REVIEW: "_on_review",
        EV_FOCAL: "_on_focal",
        EV_DAILY: "_on_daily",
    }

    def run(self) -> ReplicationResult:
        self.setup()
        handlers = {kind: getattr(self, name) for kind, name in self._HANDLERS.items()}
        fel = self.fel
        clock = self.clock
        trace = self._trace
        while len(fel):
            time, _seq, kind, subject = fel.pop()
            clock.advance(time)
            trace.update(f"{time!r}|{kind}|{subject}\n".encode())
            self._events += 1
            handlers[kind](subject)
        in_flight = self.state.arrived_total - self._resolved
        for task in self.tasks.values():
            if task.state not in (
                TaskState.COMPLETED,
                TaskState.FAILED,
                TaskState.STARVED,
                TaskState.DROPPED,
            ) and task.arrival <= self.cfg.horizon_days:
                self.task_log.append(self._log_row(task))
        s = self.state
        return ReplicationResult(
            seed=self.cfg.seed,
            counters=s.snapshot(),
            in_flight=in_flight,
            resolved=self._resolved,
            reported_failures=s.failed_review_total + s.dropped_total + s.starved_total,
            focal=self.focal_result,
            daily=self.daily,
            predictions=self.predictions,
            latest_prediction=self.latest_prediction,
            task_log=self.task_log,
            reg_by_belt=self.reg_by_belt,
            sub_by_belt=self.sub_by_belt,
            trace_hash=self._trace.hexdigest(),
            events_processed=self._events,
        )


def run_replication(cfg: RunConfig, belt_table: Optional[BeltTable] = None) -> ReplicationResult:
    return Simulation(cfg, belt_table=belt_table).run()
