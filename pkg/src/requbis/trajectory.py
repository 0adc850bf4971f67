"""Timestamped joint trajectories and their ground-contact schedules.

A Trajectory holds per-sample JointVectors for one or two agents. CSV export
uses the single-agent header ``t,q0,...,q6`` (angles in degrees, 6 decimal
places); paired trajectories use ``t,a_q0,...,a_q6,b_q0,...,b_q6``.

The ContactSchedule runs parallel to the samples and records, per sample,
each agent's world placement (4x4 base pose) plus which feet/links carry the
robot. Generators emit it; the stability module consumes it.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .kinematics import as_joint_vector, within_limits
from .model import LINK_COUNT, RobotModel


class TrajectoryError(ValueError):
    pass


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    qs: tuple[np.ndarray, ...]  # one JointVector (deg) per agent

    def q(self, agent: int = 0) -> np.ndarray:
        return self.qs[agent]


@dataclass(frozen=True)
class Trajectory:
    samples: tuple[TrajectorySample, ...]
    rate_hz: float

    @property
    def n_agents(self) -> int:
        return len(self.samples[0].qs) if self.samples else 0

    @property
    def duration(self) -> float:
        return self.samples[-1].t - self.samples[0].t if self.samples else 0.0

    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def q_array(self, agent: int = 0) -> np.ndarray:
        return np.array([s.qs[agent] for s in self.samples])

    def validate(self, models: Sequence[RobotModel] | RobotModel | None = None) -> None:
        if isinstance(models, RobotModel):
            models = (models,)
        prev_t = -np.inf
        for s in self.samples:
            if s.t <= prev_t:
                raise TrajectoryError(f"timestamps not strictly increasing at t={s.t}")
            prev_t = s.t
            if models is not None:
                for agent, (model, q) in enumerate(zip(models, s.qs)):
                    if not within_limits(model, q):
                        raise TrajectoryError(
                            f"agent {agent} outside joint limits at t={s.t}: {q}"
                        )

    def to_csv(self) -> str:
        out = io.StringIO()
        if self.n_agents == 1:
            out.write("t," + ",".join(f"q{i}" for i in range(LINK_COUNT)) + "\n")
        else:
            cols = [f"{tag}_q{i}" for tag in ("a", "b") for i in range(LINK_COUNT)]
            out.write("t," + ",".join(cols) + "\n")
        for s in self.samples:
            vals = [s.t] + [v for q in s.qs for v in q]
            out.write(",".join(f"{v:.6f}" for v in vals) + "\n")
        return out.getvalue()


def trajectory_from_samples(
    times: Iterable[float], qs_per_agent: Sequence[Sequence], rate_hz: float
) -> Trajectory:
    """Build a Trajectory from parallel arrays: one q-sequence per agent."""
    samples = []
    for k, t in enumerate(times):
        qs = tuple(as_joint_vector(qs[k]) for qs in qs_per_agent)
        samples.append(TrajectorySample(t=float(t), qs=qs))
    return Trajectory(samples=tuple(samples), rate_hz=float(rate_hz))


def trajectory_from_csv(text: str, rate_hz: float | None = None) -> Trajectory:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise TrajectoryError("empty trajectory CSV")
    header = lines[0].split(",")
    if header[0] != "t":
        raise TrajectoryError("trajectory CSV must start with a 't' column")
    n_cols = len(header) - 1
    if n_cols % LINK_COUNT != 0 or not 1 <= n_cols // LINK_COUNT <= 2:
        raise TrajectoryError(f"unexpected column count {len(header)}")
    n_agents = n_cols // LINK_COUNT
    samples = []
    for ln in lines[1:]:
        vals = [float(v) for v in ln.split(",")]
        qs = tuple(
            np.array(vals[1 + a * LINK_COUNT : 1 + (a + 1) * LINK_COUNT])
            for a in range(n_agents)
        )
        samples.append(TrajectorySample(t=vals[0], qs=qs))
    if rate_hz is None:
        if len(samples) >= 2:
            rate_hz = 1.0 / (samples[1].t - samples[0].t)
        else:
            rate_hz = 1.0
    return Trajectory(samples=tuple(samples), rate_hz=rate_hz)


@dataclass(frozen=True)
class Contact:
    """One ground contact: a foot patch, a foot point, or a lying link."""

    agent: int
    kind: str  # "foot" | "foot_point" | "link"
    ref: str | int  # foot name ("tail"/"head") or link index 0..6


@dataclass(frozen=True)
class ScheduleEntry:
    placements: tuple[np.ndarray, ...]  # world_from_base per agent
    contacts: tuple[Contact, ...]


@dataclass
class ContactSchedule:
    rate_hz: float
    entries: list[ScheduleEntry] = field(default_factory=list)

    def append(self, placements: Sequence[np.ndarray], contacts: Sequence[Contact]) -> None:
        self.entries.append(
            ScheduleEntry(
                placements=tuple(np.asarray(p, dtype=float) for p in placements),
                contacts=tuple(contacts),
            )
        )

    def to_json(self) -> str:
        doc = {
            "rate_hz": self.rate_hz,
            "entries": [
                {
                    "placements": [p.reshape(-1).tolist() for p in e.placements],
                    "contacts": [
                        {"agent": c.agent, "kind": c.kind, "ref": c.ref}
                        for c in e.contacts
                    ],
                }
                for e in self.entries
            ],
        }
        return json.dumps(doc) + "\n"


def schedule_from_json(text: str) -> ContactSchedule:
    doc = json.loads(text)
    sched = ContactSchedule(rate_hz=float(doc["rate_hz"]))
    for e in doc["entries"]:
        placements = [np.array(p, dtype=float).reshape(4, 4) for p in e["placements"]]
        contacts = [Contact(int(c["agent"]), c["kind"], c["ref"]) for c in e["contacts"]]
        sched.append(placements, contacts)
    return sched
