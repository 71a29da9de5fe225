"""Local search and memetic evolution of communities."""

from . import local_search
from . import population
from . import genetic_ops
from . import evolution
from . import protocol
