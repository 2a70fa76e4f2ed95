"""Riemannian geodesics of warped products g1 - k g2."""

from ._core import *  # noqa: F401,F403
from ._core import WarpgeoError, run_task

__all__ = [name for name in dir() if not name.startswith("_")]
