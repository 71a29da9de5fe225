"""Constraints for selecting communities into a final solution."""

import typing


class Measured(typing.Protocol):
    """The community measures constraints look at."""
    psi: float
    link_count: int
    fraction_sum: float
    valid: bool | None


class Constraint:
    """Constraints for community selection."""
    def __call__(self, stats: Measured, **kwargs) -> bool:
        """Determines whether a community satisfies the constraint.

        :param stats: The measures of a community.
        :param kwargs: Other required parameters.
        :return: True if the constraint is satisfied, false otherwise.
        """
        return True


class ValidConstraint(Constraint):
    """Only admits communities with a valid verdict."""
    def __call__(self, stats: Measured, **kwargs) -> bool:
        return stats.valid is True


class MaxPsiConstraint(Constraint):
    """Limits the cost of a community."""
    def __init__(self, psi_cutoff: float) -> None:
        """Constructs a MaxPsiConstraint object.

        :param psi_cutoff: Communities must have psi strictly below this value.
        """
        self.psi_cutoff = psi_cutoff

    def __call__(self, stats: Measured, **kwargs) -> bool:
        return stats.psi < self.psi_cutoff


class MinFractionSumConstraint(Constraint):
    """Requires a minimum community size measured as the sum of membership grades."""
    def __init__(self, min_fraction_sum: float) -> None:
        """Constructs a MinFractionSumConstraint object.

        :param min_fraction_sum: The minimum sum of fractions.
        """
        self.min_fraction_sum = min_fraction_sum

    def __call__(self, stats: Measured, **kwargs) -> bool:
        return stats.fraction_sum >= self.min_fraction_sum


class MaxSizeConstraint(Constraint):
    """Limits the share of all links a community may hold."""
    def __init__(self, max_fraction: float) -> None:
        """Constructs a MaxSizeConstraint object.

        :param max_fraction: The maximum share of all links.
        """
        self.max_fraction = max_fraction

    def __call__(self, stats: Measured, **kwargs) -> bool:
        return stats.link_count <= self.max_fraction * kwargs["link_count"]
