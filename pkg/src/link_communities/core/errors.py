"""Exceptions raised by link_communities."""


class LinkCommunityError(Exception):
    """Base class for all link community errors."""


class GraphError(LinkCommunityError, ValueError):
    """A graph violates its structural invariants."""


class EmptyGraphError(GraphError):
    """An operation received a graph without nodes or links."""


class EdgeListParseError(GraphError):
    """An edge list line could not be parsed."""
    def __init__(self, line_number: int, line: str, reason: str) -> None:
        """Constructs an EdgeListParseError object.

        :param line_number: The 1-based number of the offending line.
        :param line: The offending line.
        :param reason: Why the line was rejected.
        """
        super().__init__("line {0:d}: {1} ({2!r})".format(line_number, reason, line))
        self.line_number = line_number
        self.line = line


class LinkSetError(LinkCommunityError, ValueError):
    """A link set is invalid for the requested operation."""


class UndefinedCostError(LinkCommunityError, ArithmeticError):
    """Psi is undefined for the empty link set and for the set of all links."""


class SearchError(LinkCommunityError):
    """A local search or evolution could not produce a community."""


class MutationError(SearchError):
    """Random growth got stuck before reaching the required core size."""


class PopulationShortfallError(SearchError):
    """Not enough distinct mutants to initialise a population."""
    def __init__(self, message: str, partial: list) -> None:
        """Constructs a PopulationShortfallError object.

        :param message: The error message.
        :param partial: The distinct communities collected before giving up.
        """
        super().__init__(message)
        self.partial = partial


class OversizeCommunityError(SearchError):
    """A search produced a community with more links than the allowed fraction of the network."""
    def __init__(self, message: str, community: object) -> None:
        """Constructs an OversizeCommunityError object.

        :param message: The error message.
        :param community: The offending community.
        """
        super().__init__(message)
        self.community = community


class ConfigError(LinkCommunityError, ValueError):
    """A configuration value is out of range or malformed."""


class SeedFileError(LinkCommunityError, ValueError):
    """A seed file references an unknown node label."""
    def __init__(self, line_number: int, label: str) -> None:
        """Constructs a SeedFileError object.

        :param line_number: The 1-based number of the offending line.
        :param label: The unknown label.
        """
        super().__init__("line {0:d}: unknown node label {1!r}".format(line_number, label))
        self.line_number = line_number
        self.label = label
