from .settings import *  # noqa: F401 F403
from .parsing import *  # noqa: F401 F403
