"""Hybrid multicast beamforming and group scheduling."""

from ._hybridcast import *  # noqa: F401,F403
from ._hybridcast import __version__  # noqa: F401
