"""Two-agent docking: magnet + retractable rack state machine.

States move Retracted -> Deploying -> Engaged -> Retracted only. Docking
requires the agents' center links aligned within 5 mm translation and 5 deg
yaw (both inclusive); on success the magnets snap the residual offset to
zero and the rack extends fully.

A DockState belongs to one simulation context; transitions are serialized.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .model import ConfigurationMode, RobotModel, total_mass

TRANSLATION_TOL_MM = 5.0
YAW_TOL_DEG = 5.0

AXIS_NAMES = ("x", "y", "z")


class DockPhase(enum.Enum):
    RETRACTED = "retracted"
    DEPLOYING = "deploying"
    ENGAGED = "engaged"


class DockStateError(RuntimeError):
    """Operation not allowed in the current dock phase."""


class MisalignmentError(RuntimeError):
    def __init__(self, translation_mm: tuple[float, float, float], yaw_deg: float) -> None:
        self.translation_mm = translation_mm
        self.yaw_deg = yaw_deg
        norm = float(np.linalg.norm(translation_mm))
        if norm > TRANSLATION_TOL_MM:
            worst = int(np.argmax(np.abs(translation_mm)))
            detail = (
                f"translation misalignment {norm:.3f} mm > {TRANSLATION_TOL_MM} mm "
                f"(worst axis {AXIS_NAMES[worst]}: {translation_mm[worst]:.3f} mm)"
            )
        else:
            detail = f"yaw misalignment {yaw_deg:.3f} deg > {YAW_TOL_DEG} deg"
        super().__init__(detail)


@dataclass(frozen=True)
class DockState:
    """Rack phase plus agent B's center-link pose relative to agent A's."""

    phase: DockPhase = DockPhase.RETRACTED
    translation_mm: tuple[float, float, float] = (0.0, 0.0, 0.0)
    yaw_deg: float = 0.0
    rack_extension: float = 0.0

    def validate(self) -> None:
        if not 0.0 <= self.rack_extension <= 1.0:
            raise DockStateError(f"rack extension {self.rack_extension} outside [0, 1]")
        engaged = self.phase is DockPhase.ENGAGED
        if engaged != (self.rack_extension == 1.0):
            raise DockStateError("engaged phase must coincide with full rack extension")
        if engaged:
            norm = float(np.linalg.norm(self.translation_mm))
            if norm > TRANSLATION_TOL_MM or abs(self.yaw_deg) > YAW_TOL_DEG:
                raise DockStateError("engaged state with misaligned agents")


def aligned(state: DockState) -> bool:
    norm = float(np.linalg.norm(state.translation_mm))
    return norm <= TRANSLATION_TOL_MM and abs(state.yaw_deg) <= YAW_TOL_DEG


def set_relative_pose(
    state: DockState, translation_mm, yaw_deg: float
) -> DockState:
    """Record a new measured relative pose (only while undocked)."""
    if state.phase is not DockPhase.RETRACTED:
        raise DockStateError("cannot re-align while the rack is deployed")
    t = tuple(float(v) for v in translation_mm)
    if len(t) != 3:
        raise ValueError("translation must have 3 components")
    return replace(state, translation_mm=t, yaw_deg=float(yaw_deg))


def attempt_dock(state: DockState) -> DockState:
    """Deploy the rack and engage; magnets snap the residual pose to zero.

    The threshold is inclusive: exactly 5 mm / 5 deg still docks.
    """
    if state.phase is not DockPhase.RETRACTED:
        raise DockStateError(f"cannot dock while {state.phase.value}")
    if not aligned(state):
        raise MisalignmentError(state.translation_mm, state.yaw_deg)
    deploying = replace(state, phase=DockPhase.DEPLOYING, rack_extension=0.5)
    engaged = replace(
        deploying,
        phase=DockPhase.ENGAGED,
        rack_extension=1.0,
        translation_mm=(0.0, 0.0, 0.0),
        yaw_deg=0.0,
    )
    engaged.validate()
    return engaged


def undock(state: DockState) -> DockState:
    if state.phase is not DockPhase.ENGAGED:
        raise DockStateError(f"cannot undock while {state.phase.value}")
    retracted = replace(state, phase=DockPhase.RETRACTED, rack_extension=0.0)
    retracted.validate()
    return retracted


@dataclass(frozen=True)
class DockedPair:
    """Two agents joined at their center links."""

    agent_a: RobotModel
    agent_b: RobotModel
    state: DockState

    @property
    def mode(self) -> ConfigurationMode:
        if self.state.phase is DockPhase.ENGAGED:
            return ConfigurationMode.QUADRUPED
        return ConfigurationMode.SNAKE

    @property
    def engaged(self) -> bool:
        return self.state.phase is DockPhase.ENGAGED


def dock_pair(
    agent_a: RobotModel,
    agent_b: RobotModel,
    translation_mm=(0.0, 0.0, 0.0),
    yaw_deg: float = 0.0,
) -> DockedPair:
    """Dock two snake-mode agents; raises on misalignment or wrong mode."""
    for name, agent in (("A", agent_a), ("B", agent_b)):
        if agent.mode is not ConfigurationMode.SNAKE:
            raise DockStateError(f"agent {name} must be in snake mode to dock")
    state = set_relative_pose(DockState(), translation_mm, yaw_deg)
    return DockedPair(agent_a=agent_a, agent_b=agent_b, state=attempt_dock(state))


def undock_pair(pair: DockedPair) -> tuple[RobotModel, RobotModel, DockState]:
    """Split an engaged pair back into two independent snake agents."""
    state = undock(pair.state)
    return (
        pair.agent_a.with_mode(ConfigurationMode.SNAKE),
        pair.agent_b.with_mode(ConfigurationMode.SNAKE),
        state,
    )


def pair_total_mass(pair: DockedPair) -> float:
    """Mechanism mass is already part of each agent, so the pair is a plain sum."""
    return total_mass(pair.agent_a) + total_mass(pair.agent_b)


@dataclass
class DockEventLog:
    """JSON-lines log of dock/undock attempts."""

    events: list[dict] = field(default_factory=list)

    def record(
        self,
        t: float,
        event: str,
        translation_mm,
        yaw_deg: float,
        result: str,
    ) -> None:
        self.events.append(
            {
                "t": t,
                "event": event,
                "misalignment_mm": float(np.linalg.norm(np.asarray(translation_mm, dtype=float))),
                "yaw_deg": float(yaw_deg),
                "result": result,
            }
        )

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e) + "\n" for e in self.events)
