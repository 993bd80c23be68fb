"""Hydraulic state completion for water distribution networks."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
