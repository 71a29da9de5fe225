"""Graphs, link sets and the cost function."""

from . import errors
from . import graph
from . import link_set

from . import constraints
