from .expressions import *  # noqa: F403
from .parsing import *  # noqa: F403
from .sampling import *  # noqa: F403
from .fields import *  # noqa: F403
from .forms import *  # noqa: F403
from .poisson import *  # noqa: F403
from .riemann import *  # noqa: F403
from .flow import *  # noqa: F403
from . import exceptions
