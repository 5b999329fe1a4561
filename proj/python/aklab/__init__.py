"""Python bindings for the anticipating stochastic calculus laboratory."""

from ._aklab import *  # noqa: F401,F403
from ._aklab import __version__  # noqa: F401
