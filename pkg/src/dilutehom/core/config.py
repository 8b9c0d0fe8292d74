"""
Configuration management for dilutehom.
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List

import yaml

from .errors import ConfigError


SHAPE_DEFAULT = "circle:0.25"
OUTPUT_FORMATS = ("csv", "json", "svg")
SOLVER_METHODS = ("direct", "series")
MAX_POLYNOMIAL_DEGREE = 4


@dataclass
class GeometryConfig:
    """Model hole T at unit-cell scale."""
    shape: str = SHAPE_DEFAULT
    n_nodes: int = 128


@dataclass
class GreenConfig:
    """Ewald parameters of the torus Green's function."""
    splitting: float = 1.0
    real_shells: int = 3
    fourier_cutoff: int = 20


@dataclass
class SolverConfig:
    """Cell-problem solver settings."""
    method: str = "direct"  # direct, series
    series_terms: int = 3
    series_max_eta: float = 0.5
    max_upsample: int = 64


@dataclass
class SweepConfig:
    """Parameter sweeps shared by the tensor, cell and rates commands."""
    etas: List[float] = field(default_factory=lambda: [0.3, 0.2, 0.1])
    epsilons: List[float] = field(default_factory=lambda: [1.0 / 6.0])


@dataclass
class DiskConfig:
    """Full problem on the perforated disk."""
    outer_radius: float = 1.0
    # "i,j": c stands for c * x**i * y**j
    f: Dict[str, float] = field(default_factory=lambda: {"0,0": 4.0})
    g: Dict[str, float] = field(default_factory=dict)
    boundary_nodes: int = 256
    hole_nodes: int = 32
    radial_samples: int = 48
    angular_samples: int = 192


@dataclass
class OutputConfig:
    """Configuration for written artefacts."""
    directory: str = "."
    formats: List[str] = field(default_factory=lambda: ["csv", "json"])
    verbose: bool = False
    jobs: int = 1
    debug: bool = False


@dataclass
class Config:
    """Main configuration class for dilutehom."""

    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    green: GreenConfig = field(default_factory=GreenConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    disk: DiskConfig = field(default_factory=DiskConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    _SECTIONS = ("geometry", "green", "solver", "sweep", "disk", "output")

    @classmethod
    def load_from_file(cls, config_path: str) -> "Config":
        """Load configuration from YAML file."""
        config_file = Path(config_path)

        if not config_file.exists():
            raise FileNotFoundError(f"Configuration file not found: {config_path}")

        with open(config_file, "r", encoding="utf-8") as f:
            try:
                data = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise ConfigError(f"Malformed configuration file {config_path}: {e}") from e

        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError(f"Configuration root must be a mapping: {config_path}")

        return cls.from_dict(data)

    @staticmethod
    def _fold_flat_keys(data: Dict[str, Any]) -> Dict[str, Any]:
        """Turn dotted keys (``solver.method: series``) into nested sections."""
        nested: Dict[str, Any] = {}
        for key, value in data.items():
            if isinstance(key, str) and "." in key:
                section, _, name = key.partition(".")
                nested.setdefault(section, {})[name] = value
            elif isinstance(value, dict):
                nested.setdefault(key, {}).update(value)
            else:
                nested[key] = value
        return nested

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Config":
        """Create Config from dictionary."""
        config = cls()
        data = cls._fold_flat_keys(data or {})

        unknown = sorted(set(data) - set(cls._SECTIONS))
        if unknown:
            raise ConfigError(f"Unknown configuration sections: {unknown}")

        for section in cls._SECTIONS:
            if section not in data:
                continue
            current = getattr(config, section)
            values = data[section] or {}
            for key, value in values.items():
                if not hasattr(current, key):
                    raise ConfigError(f"Unknown configuration key: {section}.{key}")
                setattr(current, key, value)

        config._normalize()
        return config

    def _normalize(self) -> None:
        """Coerce YAML scalars to the declared types."""
        try:
            self.geometry.n_nodes = int(self.geometry.n_nodes)
            self.green.splitting = float(self.green.splitting)
            self.green.real_shells = int(self.green.real_shells)
            self.green.fourier_cutoff = int(self.green.fourier_cutoff)
            self.solver.series_terms = int(self.solver.series_terms)
            self.solver.series_max_eta = float(self.solver.series_max_eta)
            self.solver.max_upsample = int(self.solver.max_upsample)
            self.sweep.etas = [float(v) for v in self.sweep.etas]
            self.sweep.epsilons = [float(v) for v in self.sweep.epsilons]
            self.disk.outer_radius = float(self.disk.outer_radius)
            self.disk.f = {str(k): float(v) for k, v in (self.disk.f or {}).items()}
            self.disk.g = {str(k): float(v) for k, v in (self.disk.g or {}).items()}
            self.disk.boundary_nodes = int(self.disk.boundary_nodes)
            self.disk.hole_nodes = int(self.disk.hole_nodes)
            self.disk.radial_samples = int(self.disk.radial_samples)
            self.disk.angular_samples = int(self.disk.angular_samples)
            self.output.formats = [str(v).lower() for v in self.output.formats]
            self.output.jobs = int(self.output.jobs)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid configuration value: {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary."""
        return {
            "geometry": {
                "shape": self.geometry.shape,
                "n_nodes": self.geometry.n_nodes,
            },
            "green": {
                "splitting": self.green.splitting,
                "real_shells": self.green.real_shells,
                "fourier_cutoff": self.green.fourier_cutoff,
            },
            "solver": {
                "method": self.solver.method,
                "series_terms": self.solver.series_terms,
                "series_max_eta": self.solver.series_max_eta,
                "max_upsample": self.solver.max_upsample,
            },
            "sweep": {
                "etas": list(self.sweep.etas),
                "epsilons": list(self.sweep.epsilons),
            },
            "disk": {
                "outer_radius": self.disk.outer_radius,
                "f": dict(self.disk.f),
                "g": dict(self.disk.g),
                "boundary_nodes": self.disk.boundary_nodes,
                "hole_nodes": self.disk.hole_nodes,
                "radial_samples": self.disk.radial_samples,
                "angular_samples": self.disk.angular_samples,
            },
            "output": {
                "directory": self.output.directory,
                "formats": list(self.output.formats),
                "verbose": self.output.verbose,
                "jobs": self.output.jobs,
                "debug": self.output.debug,
            },
        }

    def canonical(self) -> str:
        """Canonical YAML serialization used for config echoes in outputs."""
        return yaml.safe_dump(self.to_dict(), sort_keys=True, default_flow_style=False)

    def save_to_file(self, config_path: str) -> None:
        """Save configuration to YAML file."""
        config_file = Path(config_path)
        config_file.parent.mkdir(parents=True, exist_ok=True)

        with open(config_file, "w", encoding="utf-8") as f:
            yaml.dump(self.to_dict(), f, default_flow_style=False, indent=2)

    @classmethod
    def get_default_config_path(cls) -> str:
        """Get the default configuration file path."""
        return os.path.join(os.getcwd(), "dilutehom.yaml")

    def validate(self) -> List[str]:
        """
        Check every parameter against the solver preconditions.

        Returns:
            List of human-readable problems; empty when the configuration is valid.
        """
        errors: List[str] = []

        n = self.geometry.n_nodes
        if n < 8 or n % 2:
            errors.append(f"geometry.n_nodes must be an even integer >= 8, got {n}")
        try:
            from ..geometry.curves import parse_shape

            parse_shape(self.geometry.shape, max(8, n + n % 2))
        except ValueError as e:
            errors.append(f"geometry.shape: {e}")

        if self.green.splitting <= 0:
            errors.append("green.splitting must be positive")
        if self.green.real_shells < 1:
            errors.append("green.real_shells must be >= 1")
        if self.green.fourier_cutoff < 1:
            errors.append("green.fourier_cutoff must be >= 1")

        if self.solver.method not in SOLVER_METHODS:
            errors.append(
                f"solver.method must be one of {list(SOLVER_METHODS)}, "
                f"got {self.solver.method!r}"
            )
        if self.solver.series_terms < 0:
            errors.append("solver.series_terms must be >= 0")
        if not 0.0 < self.solver.series_max_eta <= 0.5:
            errors.append("solver.series_max_eta must be in (0,0.5]")
        upsample = self.solver.max_upsample
        if upsample < 1 or upsample & (upsample - 1):
            errors.append("solver.max_upsample must be a power of two")

        for eta in self.sweep.etas:
            if not 0.0 < eta <= 1.0:
                errors.append(f"eta must be in (0,1], got {eta}")
        for eps in self.sweep.epsilons:
            if not 0.0 < eps < self.disk.outer_radius:
                errors.append(
                    f"epsilon must be in (0,{self.disk.outer_radius}), got {eps}"
                )

        if self.disk.outer_radius <= 0:
            errors.append("disk.outer_radius must be positive")
        for name in ("f", "g"):
            for key in getattr(self.disk, name):
                try:
                    i, j = (int(p) for p in key.split(","))
                except ValueError:
                    errors.append(f"disk.{name}: malformed monomial key {key!r}")
                    continue
                if i < 0 or j < 0 or i + j > MAX_POLYNOMIAL_DEGREE:
                    errors.append(
                        f"disk.{name}: monomial {key!r} exceeds degree "
                        f"{MAX_POLYNOMIAL_DEGREE}"
                    )
        for name in ("boundary_nodes", "hole_nodes"):
            value = getattr(self.disk, name)
            if value < 8 or value % 2:
                errors.append(f"disk.{name} must be an even integer >= 8")
        if self.disk.radial_samples < 4 or self.disk.angular_samples < 8:
            errors.append("disk sampling grid is too coarse")

        bad_formats = sorted(set(self.output.formats) - set(OUTPUT_FORMATS))
        if bad_formats:
            errors.append(f"output.formats contains unsupported entries {bad_formats}")
        if self.output.jobs < 1:
            errors.append("output.jobs must be >= 1")

        return errors

    def ensure_valid(self) -> "Config":
        """Raise ConfigError listing every problem found by validate()."""
        errors = self.validate()
        if errors:
            raise ConfigError("; ".join(errors))
        return self
