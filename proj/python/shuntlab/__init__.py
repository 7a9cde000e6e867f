"""Digital vibration absorber analysis: RL-shunt tuning, delay stability of the
sampled loop, admittance modification and sampled-data simulation."""

from ._core import *  # noqa: F401,F403
from ._core import __version__, NumericalError

__all__ = [name for name in dir() if not name.startswith("_")]
