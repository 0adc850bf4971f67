"""Gait generators: serpentine (linear progression, rolling), quadruped
crawl, and biped static walk.

Serpentine commands follow the two-branch sine law: even joints carry the
x-wave, odd joints the y-wave shifted by the inter-plane phase. The terminal
joints (0 and 6) are pinned to zero in snake mode, fusing each end pair of
links; the joints driving those long fused ends (1 and 5) get the projection
correction derived from the 3/2 terminal length ratio so their ground
footprint advances like a regular link's.

Generators are pure: (model(s), params, duration) -> GaitResult. Walking
gaits validate quasi-static stability sample by sample and raise
StabilityError when a cycle fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .docking import DockedPair
from .kinematics import as_joint_vector
from .model import LINK_COUNT, ConfigurationMode, RobotModel
from .stability import StabilityError, StabilityReport, validate_trajectory
from .trajectory import ContactSchedule, Trajectory, trajectory_from_samples

TERMINAL_JOINTS = (0, 6)
TERMINAL_ADJACENT_JOINTS = (1, 5)

# fused terminal links are 3/2 the regular link length
TERMINAL_LENGTH_RATIO = 1.5


class GaitError(ValueError):
    pass


@dataclass(frozen=True)
class SerpentineParams:
    """Amplitudes (deg), temporal frequencies (rad/s), per-link spatial
    phases (rad), and the inter-plane phase offset (rad)."""

    amp_x: float = 30.0
    amp_y: float = 30.0
    omega_x: float = 2.0
    omega_y: float = 2.0
    delta_x: float = 1.0
    delta_y: float = 1.0
    phase_offset: float = 0.0

    def validate(self) -> None:
        for name, amp in (("amp_x", self.amp_x), ("amp_y", self.amp_y)):
            if not 0.0 <= amp <= 90.0:
                raise GaitError(f"{name} must lie in [0, 90] deg, got {amp}")


def terminal_angle_modifier(phi_deg: float) -> float:
    """Angle for the 1.5x terminal link whose ground projection matches a
    regular link commanded phi: acos((2/3) cos phi), in [0, 180]."""
    return math.degrees(math.acos((2.0 / 3.0) * math.cos(math.radians(phi_deg))))


def _terminal_adjacent_correction(raw_deg: float) -> float:
    """Neutral-datum form of the modifier: odd in raw, zero at zero.

    Identical to 90 - terminal_angle_modifier(90 - raw), i.e.
    asin((2/3) sin raw).
    """
    return 90.0 - terminal_angle_modifier(90.0 - raw_deg)


def serpentine_angle(params: SerpentineParams, n: int, t: float) -> float:
    """Commanded angle (deg) of joint n at time t."""
    if not 0 <= n < LINK_COUNT:
        raise GaitError(f"joint index {n} out of range 0..6")
    params.validate()
    if n in TERMINAL_JOINTS:
        return 0.0
    if n % 2 == 0:
        return params.amp_x * math.sin(params.omega_x * t + n * params.delta_x)
    raw = params.amp_y * math.sin(
        params.omega_y * t + n * params.delta_y + params.phase_offset
    )
    if n in TERMINAL_ADJACENT_JOINTS:
        return _terminal_adjacent_correction(raw)
    return raw


def serpentine_pose(params: SerpentineParams, t: float) -> np.ndarray:
    return np.array([serpentine_angle(params, n, t) for n in range(LINK_COUNT)])


def rolling_params(amplitude: float = 30.0, omega: float = 2.0) -> SerpentineParams:
    """Equal-amplitude quadrature waves with no spatial phase: the body arcs
    in a plane that revolves about the chain axis, rolling the robot."""
    return SerpentineParams(
        amp_x=amplitude,
        amp_y=amplitude,
        omega_x=omega,
        omega_y=omega,
        delta_x=0.0,
        delta_y=0.0,
        phase_offset=math.pi / 2.0,
    )


def rolling_pose(params: SerpentineParams, t: float) -> np.ndarray:
    """Serpentine pose with the rolling constraints applied."""
    rolled = replace(
        params,
        delta_x=0.0,
        delta_y=0.0,
        phase_offset=math.pi / 2.0,
    )
    return serpentine_pose(rolled, t)


@dataclass
class GaitResult:
    trajectory: Trajectory
    schedule: ContactSchedule | None = None
    report: StabilityReport | None = None
    info: dict = field(default_factory=dict)


def _sample_times(duration: float, rate_hz: float) -> np.ndarray:
    if duration <= 0 or rate_hz <= 0:
        raise GaitError("duration and rate must be positive")
    n = int(round(duration * rate_hz))
    return np.arange(n) / rate_hz


def serpentine_gait(
    model: RobotModel,
    params: SerpentineParams,
    duration: float = 10.0,
    rate_hz: float = 50.0,
    rolling: bool = False,
) -> GaitResult:
    """Sampled serpentine trajectory (linear progression by default)."""
    params.validate()
    times = _sample_times(duration, rate_hz)
    pose = rolling_pose if rolling else serpentine_pose
    qs = [pose(params, t) for t in times]
    traj = trajectory_from_samples(times, [qs], rate_hz)
    traj.validate(model)
    return GaitResult(trajectory=traj)


@dataclass(frozen=True)
class CrawlParams:
    """Quadruped crawl parameters: hip sweep per step (deg), leg order, and
    per-sub-phase durations (s)."""

    hip_sweep: float = 45.0
    leg_order: tuple[int, int, int, int] = (0, 2, 1, 3)
    lift_duration: float = 0.4
    swing_duration: float = 0.8
    place_duration: float = 0.4
    shift_duration: float = 1.6
    lift_height: float = 25.0

    def validate(self) -> None:
        if self.hip_sweep <= 0:
            raise GaitError("hip_sweep must be positive")
        if sorted(self.leg_order) != [0, 1, 2, 3]:
            raise GaitError("leg_order must be a permutation of 0..3")
        for name in ("lift_duration", "swing_duration", "place_duration", "shift_duration"):
            if getattr(self, name) <= 0:
                raise GaitError(f"{name} must be positive")


@dataclass(frozen=True)
class BipedParams:
    """Biped walk parameters. lift_angle (deg) sets how far the swing leg is
    advanced; stability_limit documents the quasi-static envelope (walking
    beyond it is allowed to construct, and fails validation as expected)."""

    lift_angle: float = 15.0
    stability_limit: float = 20.0
    lean_duration: float = 1.2
    swing_duration: float = 1.6
    place_duration: float = 1.0

    def validate(self) -> None:
        if not 0.0 <= self.lift_angle <= 60.0:
            raise GaitError("lift_angle must lie in [0, 60] deg")
        if self.stability_limit <= 0:
            raise GaitError("stability_limit must be positive")
        for name in ("lean_duration", "swing_duration", "place_duration"):
            if getattr(self, name) <= 0:
                raise GaitError(f"{name} must be positive")


def quadruped_crawl_cycle(
    pair: DockedPair,
    params: CrawlParams | None = None,
    rate_hz: float = 50.0,
    require_stable: bool = True,
) -> GaitResult:
    """One full statically stable crawl cycle of the docked pair.

    Per leg, in leg_order: lift (ankle+knee bend), sweep the hip by
    hip_sweep, place; then all hips return together while the pinned feet
    drag the body forward. Raises StabilityError (with the offending report)
    when any sample fails the support-polygon check.
    """
    from . import walkgen

    params = params or CrawlParams()
    params.validate()
    if not pair.engaged:
        raise GaitError("quadruped crawl requires an engaged docked pair")
    traj, schedule, info = walkgen.crawl_cycle(pair, params, rate_hz)
    traj.validate((pair.agent_a, pair.agent_b))
    report = validate_trajectory((pair.agent_a, pair.agent_b), traj, schedule)
    if require_stable and not report.stable:
        raise StabilityError(report, context="quadruped crawl")
    return GaitResult(trajectory=traj, schedule=schedule, report=report, info=info)


def biped_walk_cycle(
    model: RobotModel,
    params: BipedParams | None = None,
    rate_hz: float = 50.0,
    require_stable: bool = True,
) -> GaitResult:
    """One full biped walking cycle (two steps) from the standing pose.

    The robot folds onto the stance leg (the stance-side terminal link lies
    flat, maximizing support), swings the free leg forward by lift_angle,
    plants it, and transfers weight; then the sides swap. Raises
    StabilityError when validation fails and require_stable is set.
    """
    from . import walkgen

    params = params or BipedParams()
    params.validate()
    if model.mode not in (ConfigurationMode.BIPED, ConfigurationMode.SNAKE):
        raise GaitError("biped walk requires a single agent")
    traj, schedule, info = walkgen.biped_cycle(model, params, rate_hz)
    traj.validate(model)
    report = validate_trajectory(model, traj, schedule)
    if require_stable and not report.stable:
        raise StabilityError(report, context="biped walk")
    return GaitResult(trajectory=traj, schedule=schedule, report=report, info=info)


def first_unstable_lift(
    model: RobotModel,
    start_deg: float = 10.0,
    stop_deg: float = 30.0,
    step_deg: float = 1.0,
    rate_hz: float = 50.0,
) -> float | None:
    """Sweep lift_angle upward; return the first angle whose cycle goes
    unstable (None if all pass)."""
    lift = start_deg
    while lift <= stop_deg + 1e-9:
        params = BipedParams(lift_angle=lift)
        result = biped_walk_cycle(model, params, rate_hz, require_stable=False)
        if not result.report.stable:
            return lift
        lift += step_deg
    return None
