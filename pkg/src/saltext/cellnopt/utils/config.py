"""
Pipeline configuration

.. versionadded:: 1.0.0

Settings are merged from, in increasing precedence:

1. the defaults of :py:class:`PipelineConfig`;
2. a Salt profile, looked up with ``config.option`` in the minion
   configuration, grains or pillar;
3. a flat ``key=value`` file whose keys use section dots
   (``ga.population_size=50``);
4. keyword arguments or command-line flags.

Example profile:

.. code-block:: yaml

    cellnopt:
      alpha: 0.0001
      preprocessing:
        max_inputs: 3
      ga:
        population_size: 80
        seed: 7
"""

import dataclasses
import logging
from dataclasses import dataclass
from dataclasses import field

import salt.utils.files  # pylint: disable=import-error
from salt.exceptions import SaltInvocationError  # pylint: disable=import-error

from saltext.cellnopt.utils.optimizer import GaConfig
from saltext.cellnopt.utils.scoring import DEFAULT_ALPHA
from saltext.cellnopt.utils.scoring import DEFAULT_NA_FAC

log = logging.getLogger(__name__)

TRUE_WORDS = frozenset(("true", "yes", "1", "on"))
FALSE_WORDS = frozenset(("false", "no", "0", "off"))


@dataclass(frozen=True)
class PreprocessingConfig:
    do_nonc: bool = True
    do_compress: bool = True
    do_expand: bool = True
    max_inputs: int = 2

    def __post_init__(self):
        if self.max_inputs < 2:
            raise SaltInvocationError(
                f"preprocessing.max_inputs must be at least 2, got {self.max_inputs}"
            )


@dataclass(frozen=True)
class PipelineConfig:
    """
    Everything one pipeline run depends on
    """

    pkn: str = None
    midas: str = None
    out: str = None
    alpha: float = DEFAULT_ALPHA
    na_fac: float = DEFAULT_NA_FAC
    max_iter: int = None
    include_time_zero: bool = False
    times: tuple = None
    heatmap: bool = True
    preprocessing: PreprocessingConfig = field(default_factory=PreprocessingConfig)
    ga: GaConfig = field(default_factory=GaConfig)

    def __post_init__(self):
        if self.alpha < 0:
            raise SaltInvocationError(f"alpha must be >= 0, got {self.alpha}")
        if self.na_fac < 0:
            raise SaltInvocationError(f"na_fac must be >= 0, got {self.na_fac}")
        if self.max_iter is not None and self.max_iter < 1:
            raise SaltInvocationError(f"max_iter must be >= 1, got {self.max_iter}")

    def to_dict(self, with_workers=True):
        """
        Flat dotted mapping of the settings, paths excluded
        """
        flat = {}
        for key, value in flatten(dataclasses.asdict(self)).items():
            if key in ("pkn", "midas", "out"):
                continue
            if key == "ga.workers" and not with_workers:
                continue
            flat[key] = list(value) if isinstance(value, tuple) else value
        return flat


def _optional(convert):
    def parse(value):
        if value is None or (isinstance(value, str) and value.strip().lower() in ("", "none")):
            return None
        return convert(value)

    return parse


def parse_bool(value):
    if isinstance(value, bool):
        return value
    word = str(value).strip().lower()
    if word in TRUE_WORDS:
        return True
    if word in FALSE_WORDS:
        return False
    raise ValueError(f"not a boolean: {value!r}")


def parse_times(value):
    if isinstance(value, str):
        value = [item for item in value.replace(",", " ").split() if item]
    return tuple(float(item) for item in value)


_PIPELINE_FIELDS = {
    "pkn": _optional(str),
    "midas": _optional(str),
    "out": _optional(str),
    "alpha": float,
    "na_fac": float,
    "max_iter": _optional(int),
    "include_time_zero": parse_bool,
    "times": _optional(parse_times),
    "heatmap": parse_bool,
}
_PREPROCESSING_FIELDS = {
    "do_nonc": parse_bool,
    "do_compress": parse_bool,
    "do_expand": parse_bool,
    "max_inputs": int,
}
_GA_FIELDS = {
    "population_size": int,
    "max_generations": int,
    "stall_generations": int,
    "bit_mutation_prob": _optional(float),
    "elitism_count": int,
    "selection_pressure": float,
    "relative_tolerance": float,
    "seed": int,
    "workers": int,
    "models_tolerance": float,
}
KNOWN_KEYS = (
    set(_PIPELINE_FIELDS)
    | {f"preprocessing.{key}" for key in _PREPROCESSING_FIELDS}
    | {f"ga.{key}" for key in _GA_FIELDS}
)


def flatten(mapping, prefix=""):
    """
    Flatten nested mappings into dotted keys
    """
    flat = {}
    for key, value in mapping.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten(value, f"{name}."))
        else:
            flat[name] = value
    return flat


def read_config_file(path):
    """
    Parse a ``key=value`` file; blank lines and ``#`` comments are skipped
    """
    try:
        with salt.utils.files.fopen(path, "r") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise SaltInvocationError(  # pylint: disable=raise-missing-from
            f"Cannot read configuration file {path}: {exc.strerror}"
        )
    settings = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise SaltInvocationError(f"{path}, line {lineno}: expected key=value")
        settings[key.strip()] = value.strip()
    log.debug("Read %d setting(s) from %s", len(settings), path)
    return settings


def _convert(key, value):
    section, _, name = key.rpartition(".")
    table = {"": _PIPELINE_FIELDS, "preprocessing": _PREPROCESSING_FIELDS, "ga": _GA_FIELDS}
    try:
        return table[section][name](value)
    except (TypeError, ValueError) as exc:
        raise SaltInvocationError(  # pylint: disable=raise-missing-from
            f"Invalid value for {key}: {value!r} ({exc})"
        )


def build_config(settings):
    """
    Build a :py:class:`PipelineConfig` from a flat dotted mapping
    """
    unknown = sorted(set(settings) - KNOWN_KEYS)
    if unknown:
        raise SaltInvocationError(f"Unknown configuration key(s): {', '.join(unknown)}")
    typed = {key: _convert(key, value) for key, value in settings.items()}
    preprocessing = {
        key.split(".", 1)[1]: value
        for key, value in typed.items()
        if key.startswith("preprocessing.")
    }
    ga = {key.split(".", 1)[1]: value for key, value in typed.items() if key.startswith("ga.")}
    top = {key: value for key, value in typed.items() if "." not in key}
    return PipelineConfig(
        preprocessing=PreprocessingConfig(**preprocessing), ga=GaConfig(**ga), **top
    )


def load_config(profile=None, option=None, path=None, overrides=None):
    """
    Merge every configuration source into one :py:class:`PipelineConfig`.

    profile
        Name of a Salt configuration mapping, resolved with ``option``
        (``__salt__["config.option"]`` inside Salt).

    path
        A ``key=value`` configuration file.

    overrides
        Flat or nested mapping of explicit settings; None values are ignored.
    """
    settings = {}
    if profile:
        if option is None:
            raise SaltInvocationError("A Salt profile can only be resolved inside Salt")
        found = option(profile)
        if not found:
            log.warning("Configuration profile %s is empty or missing", profile)
        elif not isinstance(found, dict):
            raise SaltInvocationError(f"Configuration profile {profile} is not a mapping")
        else:
            settings.update(flatten(found))
    if path:
        settings.update(read_config_file(path))
    if overrides:
        settings.update(
            {key: value for key, value in flatten(overrides).items() if value is not None}
        )
    return build_config(settings)
