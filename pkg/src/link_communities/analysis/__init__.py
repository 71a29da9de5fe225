"""Coverage, hierarchy and comparison of community solutions."""

from . import hierarchy
from . import solution
from . import matching
