"""Simulation and exact evaluation of log-lcm limit theorems."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
