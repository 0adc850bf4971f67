"""Byte codec for the daisy-chained half-duplex servo bus, plus a PID servo
emulator that tracks the commanded streams.

Wire format (fixed for this artifact, bit-exact; see tests/data conformance
vectors):

    0xFF 0xFF | id | length | instruction | payload... | checksum

* id: 0-253 addresses one actuator, 254 broadcasts to all.
* length: payload byte count.
* instruction: PING=0x01, READ=0x02, WRITE_POSITION=0x03,
  WRITE_POSITION_VELOCITY=0x04.
* payload: little-endian u16 fields. Position is 10-bit ticks, 0..1023
  mapping -90..+90 deg linearly (512 = 0 deg after rounding); velocity is
  ticks per second.
* checksum: bitwise complement of the low byte of (id + length +
  instruction + sum of payload bytes).

No response frames are modeled (half-duplex master->chain only).
"""

from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .model import LINK_COUNT
from .trajectory import Trajectory, TrajectorySample

HEADER = b"\xff\xff"
BROADCAST_ID = 254
MAX_ID = 253
TICKS_MAX = 1023
DEG_RANGE = (-90.0, 90.0)
DEG_PER_TICK = 180.0 / TICKS_MAX


class Instruction(enum.IntEnum):
    PING = 0x01
    READ = 0x02
    WRITE_POSITION = 0x03
    WRITE_POSITION_VELOCITY = 0x04


PAYLOAD_SIZES = {
    Instruction.PING: 0,
    Instruction.READ: 1,
    Instruction.WRITE_POSITION: 2,
    Instruction.WRITE_POSITION_VELOCITY: 4,
}


class CodecError(ValueError):
    pass


class BadHeaderError(CodecError):
    pass


class TruncatedFrameError(CodecError):
    pass


class ChecksumError(CodecError):
    pass


def deg_to_ticks(deg: float) -> int:
    if not DEG_RANGE[0] <= deg <= DEG_RANGE[1]:
        raise CodecError(f"angle {deg:.3f} deg outside encodable range [-90, 90]")
    ticks = round((deg - DEG_RANGE[0]) / 180.0 * TICKS_MAX)
    return min(TICKS_MAX, max(0, ticks))


def ticks_to_deg(ticks: int) -> float:
    return DEG_RANGE[0] + ticks * DEG_PER_TICK


def velocity_to_ticks(deg_per_s: float) -> int:
    ticks = round(abs(deg_per_s) / DEG_PER_TICK)
    return min(0xFFFF, ticks)


def ticks_to_velocity(ticks: int) -> float:
    return ticks * DEG_PER_TICK


@dataclass(frozen=True)
class BusFrame:
    id: int
    instruction: Instruction
    payload: bytes

    def validate(self) -> None:
        if not 0 <= self.id <= BROADCAST_ID:
            raise CodecError(f"actuator id {self.id} outside 0..254")
        expected = PAYLOAD_SIZES[Instruction(self.instruction)]
        if len(self.payload) != expected:
            raise CodecError(
                f"{Instruction(self.instruction).name} payload must be "
                f"{expected} bytes, got {len(self.payload)}"
            )


def checksum(id_: int, length: int, instruction: int, payload: bytes) -> int:
    return ~(id_ + length + instruction + sum(payload)) & 0xFF


def encode(frame: BusFrame) -> bytes:
    frame.validate()
    length = len(frame.payload)
    body = bytes([frame.id, length, int(frame.instruction)]) + frame.payload
    return HEADER + body + bytes([checksum(frame.id, length, int(frame.instruction), frame.payload)])


def write_position(id_: int, deg: float) -> BusFrame:
    return BusFrame(id_, Instruction.WRITE_POSITION, struct.pack("<H", deg_to_ticks(deg)))


def write_position_velocity(id_: int, deg: float, deg_per_s: float) -> BusFrame:
    payload = struct.pack("<HH", deg_to_ticks(deg), velocity_to_ticks(deg_per_s))
    return BusFrame(id_, Instruction.WRITE_POSITION_VELOCITY, payload)


def ping(id_: int) -> BusFrame:
    return BusFrame(id_, Instruction.PING, b"")


def decode(buf: bytes, offset: int = 0) -> tuple[BusFrame, int]:
    """Decode one frame starting at offset; returns (frame, next_offset).

    Raises BadHeaderError / TruncatedFrameError / ChecksumError, each naming
    the byte offset of the problem. Never raises anything else on arbitrary
    input.
    """
    if len(buf) - offset < 2:
        raise TruncatedFrameError(f"need 2 header bytes at offset {offset}")
    if buf[offset] != 0xFF or buf[offset + 1] != 0xFF:
        raise BadHeaderError(f"bad header at offset {offset}: {buf[offset:offset+2]!r}")
    if len(buf) - offset < 5:
        raise TruncatedFrameError(f"frame at offset {offset} cut off before length")
    id_ = buf[offset + 2]
    length = buf[offset + 3]
    instr = buf[offset + 4]
    end = offset + 5 + length + 1
    if len(buf) < end:
        raise TruncatedFrameError(
            f"frame at offset {offset} needs {end - offset} bytes, have {len(buf) - offset}"
        )
    payload = bytes(buf[offset + 5 : offset + 5 + length])
    got = buf[end - 1]
    want = checksum(id_, length, instr, payload)
    if got != want:
        raise ChecksumError(
            f"checksum mismatch at offset {end - 1}: got 0x{got:02X}, want 0x{want:02X}"
        )
    try:
        instruction = Instruction(instr)
    except ValueError as exc:
        raise CodecError(f"unknown instruction 0x{instr:02X} at offset {offset + 4}") from exc
    frame = BusFrame(id_, instruction, payload)
    frame.validate()
    return frame, end


def decode_stream(buf: bytes) -> list[BusFrame]:
    frames = []
    offset = 0
    while offset < len(buf):
        frame, offset = decode(buf, offset)
        frames.append(frame)
    return frames


def to_hex(stream: bytes) -> str:
    """Hex dump, one frame per line, two hex chars per byte, space separated."""
    lines = []
    offset = 0
    while offset < len(stream):
        _, end = decode(stream, offset)
        lines.append(" ".join(f"{b:02x}" for b in stream[offset:end]))
        offset = end
    return "\n".join(lines) + ("\n" if lines else "")


def from_hex(text: str) -> bytes:
    return bytes(
        int(tok, 16) for line in text.splitlines() for tok in line.split() if tok
    )


DEFAULT_ID_MAP = tuple(range(1, LINK_COUNT + 1))  # joint i -> bus id i+1


def compile_trajectory(
    trajectory: Trajectory,
    ids: Sequence[int] = DEFAULT_ID_MAP,
    agent: int = 0,
) -> bytes:
    """Compile one agent's trajectory into a time-ordered byte stream.

    Emits one WRITE_POSITION_VELOCITY frame per joint per sample; velocity is
    the forward finite difference of the quantized positions. Raises
    CodecError when a sample exceeds the encodable +/-90 deg range.
    """
    if len(ids) != LINK_COUNT:
        raise CodecError(f"id map must cover all {LINK_COUNT} joints")
    samples = trajectory.samples
    out = bytearray()
    for k, sample in enumerate(samples):
        q = sample.qs[agent]
        if k + 1 < len(samples):
            dt = samples[k + 1].t - sample.t
            dq = samples[k + 1].qs[agent] - q
            vel = dq / dt
        else:
            vel = np.zeros(LINK_COUNT)
        for j in range(LINK_COUNT):
            out += encode(write_position_velocity(ids[j], float(q[j]), float(vel[j])))
    return bytes(out)


def decompile_stream(
    stream: bytes,
    ids: Sequence[int] = DEFAULT_ID_MAP,
    rate_hz: float = 50.0,
) -> Trajectory:
    """Inverse of compile_trajectory up to position quantization."""
    id_to_joint = {id_: j for j, id_ in enumerate(ids)}
    frames = decode_stream(stream)
    if len(frames) % LINK_COUNT != 0:
        raise CodecError(f"stream holds {len(frames)} frames, not a multiple of 7")
    samples = []
    for k in range(0, len(frames), LINK_COUNT):
        q = np.zeros(LINK_COUNT)
        for frame in frames[k : k + LINK_COUNT]:
            if frame.instruction is not Instruction.WRITE_POSITION_VELOCITY:
                raise CodecError(f"unexpected instruction {frame.instruction.name}")
            ticks, _ = struct.unpack("<HH", frame.payload)
            q[id_to_joint[frame.id]] = ticks_to_deg(ticks)
        samples.append(TrajectorySample(t=(k // LINK_COUNT) / rate_hz, qs=(q,)))
    return Trajectory(samples=tuple(samples), rate_hz=rate_hz)


# --- servo emulation ---------------------------------------------------------

# Torque classes of the two actuator models used on the chain: the terminal
# joints carry the high-torque (2.8 Nm) servos, interior joints the 1.2 Nm
# ones. Speed limits are the corresponding no-load figures.
TORQUE_CLASSES = {
    "high": {"torque_nm": 2.8, "max_velocity_deg_s": 67.0},
    "low": {"torque_nm": 1.2, "max_velocity_deg_s": 114.0},
}
JOINT_TORQUE_CLASS = ("high", "low", "low", "low", "low", "low", "high")

DEFAULT_KP = 8.0
DEFAULT_KI = 0.1
DEFAULT_KD = 0.05


@dataclass(frozen=True)
class ServoModel:
    """Discrete position servo: PID velocity command + feedforward, clamped."""

    kp: float = DEFAULT_KP
    ki: float = DEFAULT_KI
    kd: float = DEFAULT_KD
    torque_class: str = "low"
    position: float = 0.0
    velocity: float = 0.0
    integrator: float = 0.0
    prev_error: float = 0.0

    def __post_init__(self) -> None:
        if self.kp < 0 or self.ki < 0 or self.kd < 0:
            raise ValueError("PID gains must be >= 0")
        if self.torque_class not in TORQUE_CLASSES:
            raise ValueError(f"unknown torque class {self.torque_class!r}")

    @property
    def max_velocity(self) -> float:
        return TORQUE_CLASSES[self.torque_class]["max_velocity_deg_s"]


def servo_step(
    servo: ServoModel, command_deg: float, dt: float, feedforward_deg_s: float = 0.0
) -> ServoModel:
    """One discrete update toward the command; velocity clamped, integrator
    clamped for anti-windup."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    error = command_deg - servo.position
    integrator = servo.integrator + error * dt
    windup_lim = servo.max_velocity / max(servo.ki, 1e-12)
    integrator = min(windup_lim, max(-windup_lim, integrator))
    derivative = (error - servo.prev_error) / dt
    velocity = (
        feedforward_deg_s + servo.kp * error + servo.ki * integrator + servo.kd * derivative
    )
    velocity = min(servo.max_velocity, max(-servo.max_velocity, velocity))
    return replace(
        servo,
        position=servo.position + velocity * dt,
        velocity=velocity,
        integrator=integrator,
        prev_error=error,
    )


def replay_stream(
    stream: bytes,
    ids: Sequence[int] = DEFAULT_ID_MAP,
    rate_hz: float = 50.0,
    substeps: int = 20,
    initial: Sequence[float] | None = None,
) -> Trajectory:
    """Feed a compiled stream to a farm of servo emulators.

    Commands arrive at rate_hz; each command interval is integrated with
    `substeps` PID updates. Returns the tracked joint trajectory sampled at
    the command instants.
    """
    commanded = decompile_stream(stream, ids, rate_hz)
    frames = decode_stream(stream)
    dt = 1.0 / rate_hz / substeps
    if initial is None:
        initial = commanded.samples[0].qs[0]
    servos = [
        ServoModel(torque_class=JOINT_TORQUE_CLASS[j], position=float(initial[j]))
        for j in range(LINK_COUNT)
    ]
    id_to_joint = {id_: j for j, id_ in enumerate(ids)}
    tracked = []
    for k in range(0, len(frames), LINK_COUNT):
        cmd_pos = [0.0] * LINK_COUNT
        cmd_vel = [0.0] * LINK_COUNT
        for frame in frames[k : k + LINK_COUNT]:
            ticks, vticks = struct.unpack("<HH", frame.payload)
            j = id_to_joint[frame.id]
            cmd_pos[j] = ticks_to_deg(ticks)
            cmd_vel[j] = ticks_to_velocity(vticks)
        for _ in range(substeps):
            for j in range(LINK_COUNT):
                # velocity payload is a magnitude; feed it forward toward the
                # goal, capped so one substep cannot overshoot
                err = cmd_pos[j] - servos[j].position
                ff = math.copysign(min(cmd_vel[j], abs(err) / dt), err)
                servos[j] = servo_step(servos[j], cmd_pos[j], dt, ff)
        t = (k // LINK_COUNT) / rate_hz
        tracked.append(
            TrajectorySample(t=t, qs=(np.array([s.position for s in servos]),))
        )
    return Trajectory(samples=tuple(tracked), rate_hz=rate_hz)
