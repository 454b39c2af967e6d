from .base import *  # noqa: F403
from .runner import *  # noqa: F403
from . import kinds  # noqa: F401
