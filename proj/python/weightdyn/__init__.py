"""Weight dynamics of three-layer networks: gradient-flow training as a
dynamical system, Lyapunov/CLV stability analysis and loss-outcome
prediction. Thin wrapper around the C++ core."""

try:
    from weightdyn._core import *  # noqa: F401,F403  (installed layout)
except ImportError:
    from _core import *  # noqa: F401,F403  (in-tree build: _core on sys.path)

__all__ = [name for name in dir() if not name.startswith("_")]
