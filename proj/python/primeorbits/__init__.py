"""Periodic orbits, Hausdorff dimension and zeta functions of hyperbolic rational maps."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
