"""Occupation-time laws of continuous-time Markov chains."""

from ._core import *  # noqa: F401,F403
from ._core import OccutimeError, __doc__  # noqa: F401

__version__ = "0.1.0"
