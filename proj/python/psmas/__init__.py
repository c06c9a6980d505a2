"""Phase-scheduled multi-agent coordination toolkit (Python bindings)."""

from ._psmas import *  # noqa: F401,F403
from ._psmas import __version__, PsmasError  # noqa: F401
