"""Differential kinematics toolkit: Jacobians, Hessians, velocity controllers and IK."""

from ._dkt import *  # noqa: F401,F403
from ._dkt import DktError, RobotModel, load_model

__all__ = [name for name in dir() if not name.startswith("_")]
