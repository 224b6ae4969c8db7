from ._geohull import *  # noqa: F401,F403
from ._geohull import __version__  # noqa: F401
