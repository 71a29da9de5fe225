"""Batch runs, reports and the command line."""

from . import config
from . import seeds
from . import registry
from . import report
from . import batch
from . import cli
