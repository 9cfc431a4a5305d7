"""Ambient models, submanifold data and tube flows."""
from .ambient import *  # noqa: F401,F403
from .ambient import __all__ as _ambient_all
from .flows import *  # noqa: F401,F403
from .flows import __all__ as _flows_all
from .submanifold import *  # noqa: F401,F403
from .submanifold import __all__ as _sub_all

__all__ = list(_ambient_all) + list(_sub_all) + list(_flows_all)
