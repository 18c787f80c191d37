"""Python interface to the kko library."""

from ._kko import *  # noqa: F401,F403
from ._kko import KkoError, __doc__  # noqa: F401
