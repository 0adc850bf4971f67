"""Kinematic simulator and gait toolkit for a 7-link reconfigurable
snake/biped/quadruped robot."""

__version__ = "0.1.0"

from .model import (
    ConfigurationMode,
    DHRow,
    FootGeometry,
    RobotModel,
    default_model,
    load_model,
    serialize_model,
    total_mass,
)

__all__ = [
    "ConfigurationMode",
    "DHRow",
    "FootGeometry",
    "RobotModel",
    "default_model",
    "load_model",
    "serialize_model",
    "total_mass",
    "__version__",
]
