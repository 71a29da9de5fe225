"""Validity of communities by the range criterion."""

from . import range_check
from . import beta_range_check
