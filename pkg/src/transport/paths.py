"""
Cotangent Paths
===============

A cotangent path is a pair (gamma(t), alpha(t)), t in [0, 1], with
#alpha(t) = d gamma / dt. Both halves are closed-form Exprs in t.
Piecewise paths are concatenations of legs, leg k running on [k/N, (k+1)/N].
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from src.expr import T_SLOT, Expr, EvaluationError, const, diff, evaluate, to_text
from src.multivec import PoissonStructure

logger = logging.getLogger(__name__)

GRID_POINTS = 201
CLOSURE_TOL = 1e-12


class PathError(ValueError):
    """Path is not closed, not cotangent, or has the wrong dimension."""


@dataclass(frozen=True)
class CotangentPath:
    dim: int
    gamma: Tuple[Expr, ...]
    alpha: Tuple[Expr, ...]
    name: str = ""

    def __post_init__(self):
        if len(self.gamma) != self.dim or len(self.alpha) != self.dim:
            raise PathError(f"path {self.name!r} needs {self.dim} gamma and alpha components")
        object.__setattr__(self, "_velocity", tuple(diff(g, T_SLOT) for g in self.gamma))

    @classmethod
    def constant(cls, point: Sequence[float], alpha: Sequence[Expr], name: str = "") -> "CotangentPath":
        return cls(len(point), tuple(const(x) for x in point), tuple(alpha), name)

    @property
    def legs(self) -> List["CotangentPath"]:
        return [self]

    def position(self, t: float) -> np.ndarray:
        return np.array([evaluate(g, (), t) for g in self.gamma])

    def covector(self, t: float) -> np.ndarray:
        return np.array([evaluate(a, (), t) for a in self.alpha])

    def velocity(self, t: float) -> np.ndarray:
        return np.array([evaluate(v, (), t) for v in self._velocity])

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "gamma": [to_text(g) for g in self.gamma],
            "alpha": [to_text(a) for a in self.alpha],
        }


@dataclass(frozen=True)
class PiecewisePath:
    """Concatenation of cotangent legs traversed in order."""

    legs: Tuple[CotangentPath, ...]
    name: str = ""

    def __post_init__(self):
        if not self.legs:
            raise PathError("a piecewise path needs at least one leg")
        dims = {leg.dim for leg in self.legs}
        if len(dims) != 1:
            raise PathError(f"legs have mixed dimensions {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.legs[0].dim

    def _locate(self, t: float) -> Tuple[CotangentPath, float, int]:
        n = len(self.legs)
        k = min(int(t * n), n - 1)
        return self.legs[k], t * n - k, n

    def position(self, t: float) -> np.ndarray:
        leg, s, _ = self._locate(t)
        return leg.position(s)

    def covector(self, t: float) -> np.ndarray:
        leg, s, n = self._locate(t)
        return n * leg.covector(s)

    def velocity(self, t: float) -> np.ndarray:
        leg, s, n = self._locate(t)
        return n * leg.velocity(s)

    def to_dict(self) -> dict:
        return {"name": self.name, "legs": [leg.to_dict() for leg in self.legs]}


Path = Union[CotangentPath, PiecewisePath]


def concatenate(*paths: Path, name: str = "") -> PiecewisePath:
    """Traverse the given paths in order; junctions must match to 1e-8."""
    legs: List[CotangentPath] = []
    for p in paths:
        legs.extend(p.legs)
    for a, b in zip(legs, legs[1:]):
        gap = float(np.max(np.abs(a.position(1.0) - b.position(0.0))))
        if gap > 1e-8:
            raise PathError(f"legs {a.name!r} and {b.name!r} do not meet (gap {gap:.2e})")
    return PiecewisePath(tuple(legs), name)


def check_cotangent(pi: PoissonStructure, path: Path, grid: int = GRID_POINTS) -> float:
    """max over a uniform t-grid of |gamma_dot^i - sum_j pi^{ji}(gamma) alpha_j|."""
    if path.dim != pi.dim:
        raise PathError(f"path has dimension {path.dim}, structure {pi.dim}")
    worst = 0.0
    for leg in path.legs:
        for t in np.linspace(0.0, 1.0, grid):
            try:
                x = leg.position(t)
                residual = leg.velocity(t) - pi.at(x).T @ leg.covector(t)
            except EvaluationError as e:
                raise e.at(float(t)) from None
            worst = max(worst, float(np.max(np.abs(residual))))
    return worst


def is_closed(path: Path, tol: float = CLOSURE_TOL) -> bool:
    return float(np.max(np.abs(path.position(0.0) - path.position(1.0)))) <= tol


def require_cotangent(pi: PoissonStructure, path: Path, tol: float) -> float:
    residual = check_cotangent(pi, path)
    if residual > tol:
        raise PathError(f"path {getattr(path, 'name', '')!r} is not cotangent: residual {residual:.3e} > {tol:.1e}")
    return residual
