"""Link Communities
Finds overlapping communities of links by memetic minimisation of the normalised node cut.
"""

from . import core
from . import memetics
from . import validity
from . import analysis
from . import pipeline
