"""Phase-space simulation of density operators for non-Hermitian quadratic Hamiltonians."""

from . import core, elliptic, evolution, io, lineshape
from .core import *  # noqa: F401,F403
from .elliptic import *  # noqa: F401,F403
from .evolution import *  # noqa: F401,F403
from .io import *  # noqa: F401,F403
from .lineshape import *  # noqa: F401,F403

__version__ = "0.1.0"

__all__ = sorted(
    set(core.__all__) | set(elliptic.__all__) | set(evolution.__all__) | set(io.__all__) | set(lineshape.__all__)
)
