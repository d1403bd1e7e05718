"""
Run configuration files.

A run configuration is a JSON document holding the link parameters, the
interferer model (a tagged tree, see models.model_from_dict), the SINR grid
and the Monte Carlo settings. Command-specific sections (scaling, guard,
desk) are optional.
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np

from errors import ConfigError
from models import (
    HardCoreApprox, IntensityModel, SystemParams, model_from_dict, number_field,
)
from point_process import DEFAULT_TAIL_TOLERANCE, HARD_CORE_MODES

logger = logging.getLogger(__name__)

GRID_SCALES = ("log", "linear")
GRID_UNITS = ("linear", "db")
DEFAULT_TRIALS = 10_000


def _integer(data: Dict, key: str, path: str, default: Optional[int] = None, minimum: int = 0) -> int:
    field_path = f"{path}.{key}" if path else key
    if key not in data:
        if default is None:
            raise ConfigError("missing required field", field=field_path)
        return default
    value = data[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"expected an integer, got {value!r}", field=field_path)
    if value < minimum:
        raise ConfigError(f"must be >= {minimum}", field=field_path)
    return value


def _section(data: Dict, key: str) -> Optional[Dict]:
    if key not in data or data[key] is None:
        return None
    if not isinstance(data[key], dict):
        raise ConfigError("expected an object", field=key)
    return data[key]


@dataclass(frozen=True)
class GammaGrid:
    """SINR thresholds at which curves are evaluated."""
    minimum: float
    maximum: float
    points: int
    scale: str = "log"
    units: str = "linear"

    def __post_init__(self):
        if self.points < 1:
            raise ConfigError("grid needs at least one point", field="gamma_grid.points")
        if self.scale not in GRID_SCALES:
            raise ConfigError(f"scale must be one of {GRID_SCALES}", field="gamma_grid.scale")
        if self.units not in GRID_UNITS:
            raise ConfigError(f"units must be one of {GRID_UNITS}", field="gamma_grid.units")
        if self.maximum < self.minimum or (self.points > 1 and self.maximum == self.minimum):
            raise ConfigError("max must exceed min", field="gamma_grid.max")
        if self.units == "linear":
            if self.minimum < 0:
                raise ConfigError("SINR thresholds must be nonnegative", field="gamma_grid.min")
            if self.scale == "log" and not self.minimum > 0:
                raise ConfigError("a log-spaced grid needs min > 0", field="gamma_grid.min")

    @classmethod
    def from_dict(cls, data: Dict, path: str = "gamma_grid") -> "GammaGrid":
        if not isinstance(data, dict):
            raise ConfigError("expected an object", field=path)
        return cls(
            minimum=number_field(data, "min", path),
            maximum=number_field(data, "max", path),
            points=_integer(data, "points", path),
            scale=data.get("scale", "log"),
            units=data.get("units", "linear"),
        )

    def to_dict(self) -> Dict:
        return {"min": self.minimum, "max": self.maximum, "points": self.points,
                "scale": self.scale, "units": self.units}

    def sinr_values(self) -> np.ndarray:
        """Increasing SINR thresholds in linear units."""
        if self.points == 1:
            values = np.array([self.minimum])
        elif self.scale == "log" and self.units == "linear":
            values = np.geomspace(self.minimum, self.maximum, self.points)
        else:
            # a log grid in dB is linear in dB
            values = np.linspace(self.minimum, self.maximum, self.points)
        if self.units == "db":
            values = 10.0 ** (values / 10.0)
        return values

    def gamma_values(self, params: SystemParams) -> np.ndarray:
        """Distance-normalised thresholds gamma = SINR * r_T**alpha."""
        return self.sinr_values() * params.r_T ** params.alpha


@dataclass(frozen=True)
class Outputs:
    csv: Optional[str] = None
    xlsx: Optional[str] = None
    samples: Optional[str] = None
    realization: Optional[str] = None

    @classmethod
    def from_dict(cls, data: Optional[Dict]) -> "Outputs":
        if data is None:
            return cls()
        for key, value in data.items():
            if key not in ("csv", "xlsx", "samples", "realization"):
                raise ConfigError("unknown output", field=f"outputs.{key}")
            if value is not None and not isinstance(value, str):
                raise ConfigError("expected a path", field=f"outputs.{key}")
        return cls(**data)

    def to_dict(self) -> Dict:
        return {k: v for k, v in (("csv", self.csv), ("xlsx", self.xlsx),
                                  ("samples", self.samples), ("realization", self.realization))
                if v is not None}


@dataclass(frozen=True)
class ScalingSpec:
    """Antenna counts for the scaling demonstration; density grows as ell_ratio * L."""
    L_list: Tuple[int, ...]
    ell_ratio: float

    @classmethod
    def from_dict(cls, data: Dict, path: str = "scaling") -> "ScalingSpec":
        values = data.get("L_list")
        if not isinstance(values, list) or not values:
            raise ConfigError("expected a non-empty list of antenna counts", field=f"{path}.L_list")
        for i, L in enumerate(values):
            if not isinstance(L, int) or isinstance(L, bool) or L < 1:
                raise ConfigError("antenna count must be a positive integer", field=f"{path}.L_list[{i}]")
        return cls(tuple(values), number_field(data, "ell_ratio", path, strict=True, minimum=0.0))

    def to_dict(self) -> Dict:
        return {"L_list": list(self.L_list), "ell_ratio": self.ell_ratio}


@dataclass(frozen=True)
class GuardSpec:
    outage_targets: Tuple[float, ...]
    r1_max: Optional[float] = None
    r1_points: int = 50

    @classmethod
    def from_dict(cls, data: Dict, path: str = "guard") -> "GuardSpec":
        raw = data.get("outage_target")
        targets = raw if isinstance(raw, list) else [raw]
        if not targets:
            raise ConfigError("expected at least one outage target", field=f"{path}.outage_target")
        parsed = []
        for i, value in enumerate(targets):
            where = f"{path}.outage_target" + (f"[{i}]" if isinstance(raw, list) else "")
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not 0 < value < 1:
                raise ConfigError("outage target must be a number in (0, 1)", field=where)
            parsed.append(float(value))
        r1_max = None
        if data.get("r1_max") is not None:
            r1_max = number_field(data, "r1_max", path, strict=True, minimum=0.0)
        return cls(tuple(parsed), r1_max, _integer(data, "r1_points", path, default=50, minimum=3))

    def to_dict(self) -> Dict:
        out = {"outage_target": list(self.outage_targets), "r1_points": self.r1_points}
        if self.r1_max is not None:
            out["r1_max"] = self.r1_max
        return out


@dataclass(frozen=True)
class RunConfig:
    """
    Everything a command needs: link parameters, model, grid and Monte Carlo settings.

    `snr_db`, when set, is the per-antenna SNR the noise power was derived
    from (sigma2 = r_T**-alpha / 10**(snr_db / 10)); it is kept so that the
    file written back matches the one read.
    """
    system: SystemParams
    model: IntensityModel
    gamma_grid: GammaGrid
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    threads: int = 1
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE
    tolerance: Optional[float] = None
    hard_core_sampler: str = "matern"
    outputs: Outputs = field(default_factory=Outputs)
    scaling: Optional[ScalingSpec] = None
    guard: Optional[GuardSpec] = None
    desk_trials: Optional[int] = None
    snr_db: Optional[float] = None
    description: Optional[str] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1", field="trials")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1", field="threads")
        if not 0 <= self.tail_tolerance < 1:
            raise ConfigError("tail tolerance must lie in [0, 1)", field="tail_tolerance")
        if self.hard_core_sampler not in HARD_CORE_MODES:
            raise ConfigError(f"must be one of {HARD_CORE_MODES}", field="hard_core_sampler")

    @classmethod
    def from_dict(cls, data: Dict) -> "RunConfig":
        """
        Parse a configuration tree.

        Raises:
            ConfigError: with the dotted path of the offending field
        """
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        for key in ("system", "model", "gamma_grid"):
            if key not in data:
                raise ConfigError("missing required section", field=key)

        system = data["system"]
        snr_db = None
        if isinstance(system, dict) and "snr_db" in system:
            if "sigma2" in system:
                raise ConfigError("give either sigma2 or snr_db, not both", field="system.snr_db")
            snr_db = number_field(system, "snr_db", "system")
            system = dict(system)
            del system["snr_db"]
            system["sigma2"] = _noise_from_snr(system, snr_db)
        params = SystemParams.from_dict(system)

        desk = _section(data, "desk")
        scaling = _section(data, "scaling")
        guard = _section(data, "guard")
        tolerance = None
        if data.get("tolerance") is not None:
            tolerance = number_field(data, "tolerance", "", minimum=0.0)
        description = data.get("description")
        if description is not None and not isinstance(description, str):
            raise ConfigError("expected a string", field="description")
        config = cls(
            system=params,
            model=model_from_dict(data["model"], "model"),
            gamma_grid=GammaGrid.from_dict(data["gamma_grid"]),
            trials=_integer(data, "trials", "", default=DEFAULT_TRIALS, minimum=1),
            seed=_integer(data, "seed", "", default=0),
            threads=_integer(data, "threads", "", default=1, minimum=1),
            tail_tolerance=number_field(data, "tail_tolerance", "", default=DEFAULT_TAIL_TOLERANCE, minimum=0.0),
            tolerance=tolerance,
            hard_core_sampler=data.get("hard_core_sampler", "matern"),
            outputs=Outputs.from_dict(_section(data, "outputs")),
            scaling=ScalingSpec.from_dict(scaling) if scaling is not None else None,
            guard=GuardSpec.from_dict(guard) if guard is not None else None,
            desk_trials=_integer(desk, "trials", "desk", minimum=1) if desk is not None else None,
            snr_db=snr_db,
            description=description,
        )
        if config.guard is not None and not isinstance(config.model, HardCoreApprox):
            raise ConfigError("guard-zone optimisation needs a hard_core model", field="model.type")
        return config

    def to_dict(self) -> Dict:
        system = self.system.to_dict()
        if self.snr_db is not None:
            del system["sigma2"]
            system["snr_db"] = self.snr_db
        out = {} if self.description is None else {"description": self.description}
        out.update({
            "system": system,
            "model": self.model.to_dict(),
            "gamma_grid": self.gamma_grid.to_dict(),
            "trials": self.trials,
            "seed": self.seed,
            "threads": self.threads,
            "tail_tolerance": self.tail_tolerance,
            "hard_core_sampler": self.hard_core_sampler,
        })
        if self.tolerance is not None:
            out["tolerance"] = self.tolerance
        outputs = self.outputs.to_dict()
        if outputs:
            out["outputs"] = outputs
        if self.scaling is not None:
            out["scaling"] = self.scaling.to_dict()
        if self.guard is not None:
            out["guard"] = self.guard.to_dict()
        if self.desk_trials is not None:
            out["desk"] = {"trials": self.desk_trials}
        return out

    @property
    def config_hash(self) -> str:
        """Short SHA-256 of the canonical JSON form."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    @property
    def gamma_max(self) -> float:
        return float(self.gamma_grid.gamma_values(self.system)[-1])

    def with_overrides(self, seed: Optional[int] = None, trials: Optional[int] = None,
                       threads: Optional[int] = None, tolerance: Optional[float] = None,
                       desk: bool = False) -> "RunConfig":
        """Apply command-line overrides; an explicit trial count wins over the desk profile."""
        changes = {}
        if desk:
            if self.desk_trials is None:
                raise ConfigError("configuration has no desk profile", field="desk")
            changes["trials"] = self.desk_trials
        if trials is not None:
            changes["trials"] = trials
        if seed is not None:
            changes["seed"] = seed
        if threads is not None:
            changes["threads"] = threads
        if tolerance is not None:
            changes["tolerance"] = tolerance
        return replace(self, **changes) if changes else self


def _noise_from_snr(system: Dict, snr_db: float) -> float:
    alpha = number_field(system, "alpha", "system")
    r_T = number_field(system, "r_T", "system", strict=True, minimum=0.0)
    return r_T ** -alpha / 10.0 ** (snr_db / 10.0)


def load_config(config_path: str) -> RunConfig:
    """
    Load a run configuration file.

    Args:
        config_path: Path to the JSON file

    Returns:
        Parsed RunConfig

    Raises:
        ConfigError: unreadable file, JSON syntax error (with line and column)
            or invalid content (with the field path)
    """
    try:
        with open(config_path, "r") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"configuration file not found: {config_path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in {config_path}: {e.msg}", line=e.lineno, column=e.colno)
    config = RunConfig.from_dict(data)
    logger.debug("[CLI] loaded %s (hash %s)", config_path, config.config_hash)
    if config.tail_tolerance > DEFAULT_TAIL_TOLERANCE:
        logger.warning("[CLI] %s truncates the simulation window at tail tolerance %g (default %g)",
                       config_path, config.tail_tolerance, DEFAULT_TAIL_TOLERANCE)
    return config
