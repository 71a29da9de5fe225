"""Run configuration from TOML files, command-line flags and the environment."""

from ..core import errors
from ..memetics import population

from collections import abc
import dataclasses
import enum
import math
import os
import tomllib
import typing

WORKERS_ENV = "LINK_COMMUNITIES_WORKERS"


class SeedStrategy(enum.Enum):
    RANDOM = "random"
    FILE = "file"


@dataclasses.dataclass(frozen=True)
class SelectionConfig:
    """Thresholds of the final selection."""
    psi_cutoff: float = math.inf
    min_fraction_sum: float = 20.0
    exclude_larger_than: float = 0.5
    inclusion_threshold: float = 0.95

    def __post_init__(self) -> None:
        if self.psi_cutoff <= 0:
            raise errors.ConfigError("psi_cutoff must be positive")
        if self.min_fraction_sum < 0:
            raise errors.ConfigError("min_fraction_sum must not be negative")
        if not 0 < self.exclude_larger_than <= 1:
            raise errors.ConfigError("exclude_larger_than must lie in (0, 1]")
        if not 0 < self.inclusion_threshold <= 1:
            raise errors.ConfigError("inclusion_threshold must lie in (0, 1]")


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """All parameters of a batch run."""
    graph: str | None = None
    output_dir: str = "out"
    seed_strategy: SeedStrategy = SeedStrategy.RANDOM
    seed_count: int = 800
    seed_file: str | None = None
    resolution: float = 1 / 3
    first_round: population.EvolutionConfig = population.EvolutionConfig.first_round()
    second_round: population.EvolutionConfig = population.EvolutionConfig.second_round()
    selection: SelectionConfig = SelectionConfig()
    workers: int = 1
    master_seed: int = 0
    batch_size: int = 8
    epsilon: float = 0.005
    patience: int = 2
    max_batches: int = 100
    use_side_seeds: bool = False

    def __post_init__(self) -> None:
        if not 0 < self.resolution < 1:
            raise errors.ConfigError("resolution must lie in (0, 1), got {0}".format(self.resolution))
        for name in ("seed_count", "workers", "batch_size", "patience", "max_batches"):
            if getattr(self, name) < 1:
                raise errors.ConfigError("{0} must be positive".format(name))
        if self.epsilon < 0:
            raise errors.ConfigError("epsilon must not be negative")
        if self.master_seed < 0:
            raise errors.ConfigError("master_seed must not be negative")
        if self.seed_strategy is SeedStrategy.FILE and not self.seed_file:
            raise errors.ConfigError("the file seed strategy needs a seed_file")
        for cfg in (self.first_round, self.second_round):
            if cfg.resolution != self.resolution:
                raise errors.ConfigError("evolution resolution differs from the run resolution")

    def replace(self, **changes) -> "RunConfig":
        """Returns a copy with changed fields, keeping the evolution resolution in step.

        :param changes: Field values.
        :return: The new configuration.
        """
        if "resolution" in changes:
            r = changes["resolution"]
            changes.setdefault("first_round", self.first_round)
            changes.setdefault("second_round", self.second_round)
            changes["first_round"] = changes["first_round"].replace(resolution=r)
            changes["second_round"] = changes["second_round"].replace(resolution=r)
        return dataclasses.replace(self, **changes)

    def with_environment(self, environ: abc.Mapping[str, str] = os.environ) -> "RunConfig":
        """Applies the worker count override from the environment.

        :param environ: The environment.
        :return: The configuration with the override applied.
        """
        value = environ.get(WORKERS_ENV)
        if value is None:
            return self
        try:
            workers = int(value)
        except ValueError:
            raise errors.ConfigError("{0} must be an integer, got {1!r}".format(WORKERS_ENV, value)) from None
        return self.replace(workers=workers)

    def to_dict(self) -> dict[str, typing.Any]:
        """Converts the configuration to JSON-compatible values.

        :return: A nested dictionary accepted by from_dict.
        """
        def convert(value: typing.Any) -> typing.Any:
            if isinstance(value, enum.Enum):
                return value.value
            if isinstance(value, float) and math.isinf(value):
                return None
            if dataclasses.is_dataclass(value):
                return {f.name: convert(getattr(value, f.name)) for f in dataclasses.fields(value)}
            return value
        return convert(self)

    @classmethod
    def from_dict(cls, data: abc.Mapping[str, typing.Any]) -> "RunConfig":
        """Builds a configuration from nested values as written by to_dict or read from TOML.

        :param data: Top-level run keys plus "evolution"/"first_round", "second_round" and "selection" tables.
        :return: The configuration.
        """
        data = dict(data)
        known = {f.name for f in dataclasses.fields(cls)}
        first = dict(data.pop("first_round", None) or data.pop("evolution", None) or {})
        data.pop("evolution", None)
        second = dict(data.pop("second_round", None) or {})
        selection = dict(data.pop("selection", None) or {})
        unknown = set(data) - known
        if unknown:
            raise errors.ConfigError("unknown configuration keys: {0}".format(", ".join(sorted(unknown))))

        resolution = float(data.get("resolution", 1 / 3))
        data["resolution"] = resolution
        if "seed_strategy" in data:
            data["seed_strategy"] = _enum(SeedStrategy, data["seed_strategy"])
        try:
            data["first_round"] = population.EvolutionConfig.first_round(**_evolution(first, resolution))
            data["second_round"] = population.EvolutionConfig.second_round(**_evolution(second, resolution))
            if selection.get("psi_cutoff") is None:
                selection.pop("psi_cutoff", None)
            data["selection"] = SelectionConfig(**selection)
            return cls(**data)
        except TypeError as e:
            raise errors.ConfigError(str(e)) from e

    @classmethod
    def from_toml(cls, path: str | os.PathLike) -> "RunConfig":
        """Reads a TOML configuration file.

        :param path: The path to the file.
        :return: The configuration.
        """
        try:
            with open(path, "rb") as f:
                data = tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            raise errors.ConfigError("{0}: {1}".format(path, e)) from e
        return cls.from_dict(data)


def _enum[E: enum.Enum](kind: type[E], value: typing.Any) -> E:
    try:
        return kind(value)
    except ValueError:
        raise errors.ConfigError("{0!r} is not a valid {1}".format(value, kind.__name__)) from None


def _evolution(values: dict[str, typing.Any], resolution: float) -> dict[str, typing.Any]:
    if "resolution" in values and values["resolution"] != resolution:
        raise errors.ConfigError("evolution tables must not set their own resolution")
    values["resolution"] = resolution
    if "schedule" in values:
        values["schedule"] = _enum(population.VarianceSchedule, values["schedule"])
    return values
