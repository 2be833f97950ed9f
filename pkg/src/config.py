"""
Configuration Module
====================

Sampling, integration, tolerance and logging parameters.
Loads from YAML and overrides from environment variables.
"""

import os
import logging
from pathlib import Path
from typing import Optional
from dataclasses import dataclass, field, asdict
import yaml
from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)


# ============================================================================
# NUMERICS
# ============================================================================

@dataclass
class SamplingConfig:
    """🎲 Seeded Latin-hypercube sampling of the chart region"""
    seed: int = 0
    points: int = 100
    low: float = -1.0
    high: float = 1.0


@dataclass
class IntegratorConfig:
    """🌀 Fixed-step classical RK4 on [0, 1]"""
    steps: int = 1000

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"integrator steps must be >= 1, got {self.steps}")


@dataclass
class ToleranceConfig:
    """📏 Acceptance thresholds for residuals"""
    jacobi: float = 1e-9
    identity: float = 1e-10
    operator: float = 1e-9
    transport: float = 1e-8
    holonomy: float = 1e-6
    modular: float = 1e-8
    cotangent: float = 1e-8
    classes: float = 1e-8


# ============================================================================
# INFRA
# ============================================================================

@dataclass
class LoggingConfig:
    level: str = "INFO"
    file: Optional[str] = None


# ============================================================================
# MAIN CONFIG
# ============================================================================

@dataclass
class Config:
    """Main configuration container."""

    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    tolerance: ToleranceConfig = field(default_factory=ToleranceConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    @classmethod
    def load(cls, config_path: str = "config.yaml") -> "Config":
        config = cls()
        if Path(config_path).exists():
            with open(config_path, "r") as f:
                yaml_config = yaml.safe_load(f) or {}
            config = cls._from_dict(yaml_config)
            logger.info(f"Loaded configuration from {config_path}")
        else:
            logger.debug(f"Config file {config_path} not found, using defaults/env vars")
        config._load_from_env()
        return config

    def _load_from_env(self) -> None:
        """Override from environment variables."""
        if v := os.getenv("PG_SEED"): self.sampling.seed = int(v)
        if v := os.getenv("PG_POINTS"): self.sampling.points = int(v)
        if v := os.getenv("PG_STEPS"): self.integrator.steps = int(v)

        # Logging
        if v := os.getenv("LOG_LEVEL"): self.logging.level = v

    @classmethod
    def _from_dict(cls, data: dict) -> "Config":
        config = cls()
        if d := data.get("sampling"): config.sampling = SamplingConfig(**d)
        if d := data.get("integrator"): config.integrator = IntegratorConfig(**d)
        if d := data.get("tolerance"): config.tolerance = ToleranceConfig(**d)
        if d := data.get("logging"): config.logging = LoggingConfig(**d)
        return config

    def validate(self) -> bool:
        if self.integrator.steps < 1:
            logger.error("Integrator steps must be at least 1")
            return False
        if self.sampling.points < 1:
            logger.error("At least one sample point is required")
            return False
        if self.sampling.low >= self.sampling.high:
            logger.error(f"Empty sample region [{self.sampling.low}, {self.sampling.high}]")
            return False
        if self.integrator.steps < 100:
            logger.warning("Fewer than 100 RK4 steps; transport tolerances may not be met")
        return True

    def to_dict(self) -> dict:
        return asdict(self)

    def print_config(self) -> None:
        logger.info("=" * 60)
        logger.info("POISSON GEOMETRY TOOLKIT CONFIGURATION")
        logger.info("=" * 60)
        logger.info(f"Sampling: {self.sampling.points} points in [{self.sampling.low}, {self.sampling.high}]^m (seed {self.sampling.seed})")
        logger.info(f"Integrator: RK4, {self.integrator.steps} steps")
        logger.info(f"Tolerances: jacobi {self.tolerance.jacobi:.0e} | identity {self.tolerance.identity:.0e} | "
                    f"holonomy {self.tolerance.holonomy:.0e} | modular {self.tolerance.modular:.0e}")
        logger.info(f"Log level: {self.logging.level}")
        logger.info("=" * 60)
