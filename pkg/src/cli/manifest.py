"""
Chart Manifests
===============

YAML description of a coordinate chart: the Poisson structure and optional
metric, connection, Lie algebra, named cotangent paths, density, integrator
settings and sample region. Expression values are strings in the expr DSL.

    manifold:   {dim: 3}
    poisson:    {pi.1.2: "x3", pi.2.3: "x1", pi.1.3: "-x2"}
    metric:     {g.1.1: "1", g.2.2: "1", g.3.3: "1"}
    connection: {type: canonical}          # canonical | flat | levi_civita | explicit
    lie_algebra: {dim: 3, c.1.2.3: 1}
    paths:
      loop: {gamma.1: "0", alpha.3: "1"}
      square: {legs: [left, up, right, down]}
    density:    {weight: "1"}
    integrator: {steps: 1000}
    region:     {low: -1, high: 1}
"""

import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import yaml

from src.classes import LieAlgebra
from src.connection import (
    ConnectionSymbols,
    Metric,
    canonical_poisson_connection,
    flat_connection,
    levi_civita_contra,
    volume_weight,
)
from src.expr import ONE, ZERO, Expr, parse_value
from src.multivec import DensityField, PoissonStructure
from src.transport import CotangentPath, Path as CotPath, concatenate
from src.utils.sampling import sample_points

logger = logging.getLogger(__name__)

CONNECTION_TYPES = ("canonical", "flat", "levi_civita", "explicit")
SECTIONS = ("manifold", "poisson", "metric", "connection", "lie_algebra", "paths", "density", "integrator", "region")


class ManifestError(ValueError):
    """Malformed manifest or a section missing for the requested command."""


def _indices(key: str, prefix: str, count: int, dim: int) -> Tuple[int, ...]:
    parts = key.split(".")
    if parts[0] != prefix or len(parts) != count + 1:
        raise ManifestError(f"bad key {key!r}: expected {prefix}" + ".<i>" * count)
    try:
        idx = tuple(int(p) for p in parts[1:])
    except ValueError:
        raise ManifestError(f"bad key {key!r}: indices must be integers") from None
    if any(i < 1 or i > dim for i in idx):
        raise ManifestError(f"bad key {key!r}: indices must lie in 1..{dim}")
    return tuple(i - 1 for i in idx)


def _expr(value, dim: int, where: str, allow_t: bool = False) -> Expr:
    try:
        return parse_value(value, dim, allow_t)
    except ValueError as e:
        raise ManifestError(f"{where}: {e}") from e


def _section(data: dict, name: str) -> dict:
    value = data.get(name) or {}
    if not isinstance(value, dict):
        raise ManifestError(f"section {name!r} must be a mapping")
    return value


@dataclass
class Region:
    lows: List[float]
    highs: List[float]

    def sample(self, n: int, seed: int) -> np.ndarray:
        return sample_points(len(self.lows), n, seed=seed, lows=self.lows, highs=self.highs)


@dataclass
class Manifest:
    """A parsed chart manifest."""

    dim: int
    pi: PoissonStructure
    metric: Optional[Metric] = None
    connection_type: str = "canonical"
    symbols: Optional[ConnectionSymbols] = None
    algebra: Optional[LieAlgebra] = None
    paths: Dict[str, CotPath] = field(default_factory=dict)
    density: Optional[DensityField] = None
    steps: Optional[int] = None
    region: Optional[Region] = None
    name: str = ""
    digest: str = ""

    @classmethod
    def load(cls, path: str) -> "Manifest":
        p = Path(path)
        if not p.exists():
            raise ManifestError(f"manifest {path} not found")
        raw = p.read_bytes()
        try:
            data = yaml.safe_load(raw) or {}
        except yaml.YAMLError as e:
            raise ManifestError(f"manifest {path} is not valid YAML: {e}") from e
        manifest = cls.from_dict(data, name=p.stem)
        manifest.digest = hashlib.sha256(raw).hexdigest()
        logger.debug(f"loaded manifest {path} (dim {manifest.dim}, sha256 {manifest.digest[:12]})")
        return manifest

    @classmethod
    def from_dict(cls, data: dict, name: str = "") -> "Manifest":
        if not isinstance(data, dict):
            raise ManifestError("manifest must be a mapping of sections")
        unknown = sorted(set(data) - set(SECTIONS))
        if unknown:
            raise ManifestError(f"unknown sections {unknown}")
        dim = _section(data, "manifold").get("dim")
        if not isinstance(dim, int) or dim < 1:
            raise ManifestError("manifold.dim must be a positive integer")

        pi = cls._parse_poisson(_section(data, "poisson"), dim, name)
        metric = cls._parse_metric(data, dim)
        conn_type, symbols = cls._parse_connection(data, dim, metric)
        manifest = cls(
            dim=dim,
            pi=pi,
            metric=metric,
            connection_type=conn_type,
            symbols=symbols,
            algebra=cls._parse_algebra(data),
            paths=cls._parse_paths(_section(data, "paths"), dim),
            density=cls._parse_density(data, dim),
            steps=cls._parse_steps(data),
            region=cls._parse_region(data, dim),
            name=name,
        )
        if manifest.algebra is not None and manifest.algebra.dim != dim:
            raise ManifestError(f"lie_algebra.dim {manifest.algebra.dim} does not match manifold.dim {dim}")
        return manifest

    # --- sections ---

    @staticmethod
    def _parse_poisson(section: dict, dim: int, name: str) -> PoissonStructure:
        comps = {}
        for key, value in section.items():
            i, j = _indices(str(key), "pi", 2, dim)
            if i >= j:
                raise ManifestError(f"poisson: indices must satisfy i<j, got {key}")
            comps[(i, j)] = _expr(value, dim, f"poisson.{key}")
        return PoissonStructure(dim, comps, name=name)

    @staticmethod
    def _parse_metric(data: dict, dim: int) -> Optional[Metric]:
        if "metric" not in data:
            return None
        upper = {}
        for key, value in _section(data, "metric").items():
            i, j = _indices(str(key), "g", 2, dim)
            a, b = min(i, j), max(i, j)
            if (a, b) in upper:
                raise ManifestError(f"metric: entry {key} given twice")
            upper[(a, b)] = _expr(value, dim, f"metric.{key}")
        return Metric.from_upper(dim, upper)

    @staticmethod
    def _parse_connection(data: dict, dim: int, metric: Optional[Metric]):
        section = _section(data, "connection")
        kind = section.get("type", "canonical")
        if kind not in CONNECTION_TYPES:
            raise ManifestError(f"connection.type must be one of {CONNECTION_TYPES}, got {kind!r}")
        if kind == "levi_civita" and metric is None:
            raise ManifestError("connection.type levi_civita needs a metric section")
        if kind != "explicit":
            return kind, None
        entries = {}
        for key, value in (section.get("symbols") or {}).items():
            idx = _indices(str(key), "gamma", 3, dim)
            entries[idx] = _expr(value, dim, f"connection.symbols.{key}")
        return kind, ConnectionSymbols.from_sparse(dim, entries)

    @staticmethod
    def _parse_algebra(data: dict) -> Optional[LieAlgebra]:
        if "lie_algebra" not in data:
            return None
        section = dict(_section(data, "lie_algebra"))
        n = section.pop("dim", None)
        if not isinstance(n, int) or n < 1:
            raise ManifestError("lie_algebra.dim must be a positive integer")
        brackets: Dict[Tuple[int, int], Dict[int, float]] = {}
        for key, value in section.items():
            i, j, k = _indices(str(key), "c", 3, n)
            if i >= j:
                raise ManifestError(f"lie_algebra: indices must satisfy i<j, got {key}")
            try:
                brackets.setdefault((i, j), {})[k] = float(value)
            except (TypeError, ValueError):
                raise ManifestError(f"lie_algebra.{key}: structure constants must be numbers") from None
        algebra = LieAlgebra.from_brackets(n, brackets)
        if not algebra.validate():
            raise ManifestError("lie_algebra: structure constants violate the Jacobi identity")
        return algebra

    @staticmethod
    def _parse_paths(section: dict, dim: int) -> Dict[str, CotPath]:
        paths: Dict[str, CotPath] = {}
        pending = {}
        for name, spec in section.items():
            if not isinstance(spec, dict):
                raise ManifestError(f"paths.{name} must be a mapping")
            if "legs" in spec:
                pending[name] = spec["legs"]
                continue
            gamma: List[Expr] = [ZERO] * dim
            alpha: List[Expr] = [ZERO] * dim
            for key, value in spec.items():
                head = str(key).split(".")[0]
                if head not in ("gamma", "alpha"):
                    raise ManifestError(f"paths.{name}: unexpected key {key!r}")
                (i,) = _indices(str(key), head, 1, dim)
                target = gamma if head == "gamma" else alpha
                target[i] = _expr(value, dim, f"paths.{name}.{key}", allow_t=True)
            paths[name] = CotangentPath(dim, tuple(gamma), tuple(alpha), str(name))
        for name, legs in pending.items():
            missing = [leg for leg in legs if leg not in paths]
            if missing:
                raise ManifestError(f"paths.{name}: unknown legs {missing}")
            try:
                paths[name] = concatenate(*(paths[leg] for leg in legs), name=str(name))
            except ValueError as e:
                raise ManifestError(f"paths.{name}: {e}") from e
        return paths

    @staticmethod
    def _parse_density(data: dict, dim: int) -> Optional[DensityField]:
        if "density" not in data:
            return None
        weight = _section(data, "density").get("weight", 1)
        return DensityField(_expr(weight, dim, "density.weight"))

    @staticmethod
    def _parse_steps(data: dict) -> Optional[int]:
        steps = _section(data, "integrator").get("steps")
        if steps is None:
            return None
        if not isinstance(steps, int) or steps < 1:
            raise ManifestError("integrator.steps must be a positive integer")
        return steps

    @staticmethod
    def _parse_region(data: dict, dim: int) -> Optional[Region]:
        if "region" not in data:
            return None
        section = _section(data, "region")
        lows = section.get("lows", [section.get("low", -1.0)] * dim)
        highs = section.get("highs", [section.get("high", 1.0)] * dim)
        if len(lows) != dim or len(highs) != dim:
            raise ManifestError(f"region bounds need {dim} entries")
        lows, highs = [float(v) for v in lows], [float(v) for v in highs]
        if any(lo >= hi for lo, hi in zip(lows, highs)):
            raise ManifestError("region: every low must be below its high")
        return Region(lows, highs)

    # --- resolution ---

    def connection(self) -> ConnectionSymbols:
        if self.connection_type == "explicit":
            return self.symbols
        if self.connection_type == "flat":
            return flat_connection(self.dim)
        if self.connection_type == "levi_civita":
            return levi_civita_contra(self.pi, self.metric)
        return canonical_poisson_connection(self.pi)

    def connection_pair(self) -> Tuple[ConnectionSymbols, ConnectionSymbols]:
        """Basic connection and the metric-induced one (flat without a metric)."""
        d1 = canonical_poisson_connection(self.pi)
        d0 = levi_civita_contra(self.pi, self.metric) if self.metric is not None else flat_connection(self.dim)
        return d1, d0

    def density_field(self) -> DensityField:
        """Declared density, else the metric volume, else Lebesgue."""
        if self.density is not None:
            return self.density
        if self.metric is not None:
            return DensityField(volume_weight(self.metric))
        return DensityField(ONE)

    def path(self, name: str) -> CotPath:
        if name not in self.paths:
            raise ManifestError(f"no path named {name!r} (have {sorted(self.paths)})")
        return self.paths[name]

    def sample(self, n: int, seed: int, low: float = -1.0, high: float = 1.0) -> np.ndarray:
        region = self.region or Region([low] * self.dim, [high] * self.dim)
        return region.sample(n, seed)
