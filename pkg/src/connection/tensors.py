"""
Tensor Fields, Symbols and Metrics
==================================

Dense Expr containers for the connection layer:

- TensorField: type (r, s) components K^{i_1..i_r}_{j_1..j_s}
- ConnectionSymbols: Gamma^{ij}_k with D_{dx^i} dx^j = Gamma^{ij}_k dx^k
- Metric: symmetric g_ij, positive-definite on the sampled region
"""

import logging
from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, List, Sequence, Tuple

import numpy as np

from src.expr import ZERO, Expr, EvaluationError, as_expr, evaluate, to_text

logger = logging.getLogger(__name__)

PROVENANCES = ("canonical_poisson", "flat", "levi_civita", "explicit")


class MetricError(ValueError):
    """Metric is singular, indefinite or not evaluable at a sampled point."""


@dataclass(frozen=True)
class TensorField:
    """Type (r, s) tensor field with m^(r+s) dense Expr components, upper indices first."""

    contravariant: int
    covariant: int
    dim: int
    components: Tuple[Expr, ...]

    def __post_init__(self):
        expected = self.dim ** (self.contravariant + self.covariant)
        if len(self.components) != expected:
            raise ValueError(f"tensor of type ({self.contravariant}, {self.covariant}) in dim {self.dim} "
                             f"needs {expected} components, got {len(self.components)}")

    @classmethod
    def build(cls, r: int, s: int, dim: int, fn: Callable[[Tuple[int, ...]], Expr]) -> "TensorField":
        comps = tuple(as_expr(fn(idx)) for idx in product(range(dim), repeat=r + s))
        return cls(r, s, dim, comps)

    @property
    def rank(self) -> int:
        return self.contravariant + self.covariant

    def _flat(self, indices: Sequence[int]) -> int:
        if len(indices) != self.rank:
            raise IndexError(f"expected {self.rank} indices, got {len(indices)}")
        pos = 0
        for i in indices:
            pos = pos * self.dim + i
        return pos

    def __getitem__(self, indices) -> Expr:
        if isinstance(indices, int):
            indices = (indices,)
        return self.components[self._flat(indices)]

    def indices(self) -> Iterable[Tuple[int, ...]]:
        return product(range(self.dim), repeat=self.rank)

    def at(self, point: Sequence[float]) -> np.ndarray:
        values = np.array([evaluate(c, point) for c in self.components], dtype=float)
        return values.reshape((self.dim,) * self.rank) if self.rank else values.reshape(())

    def max_abs(self, points: Iterable[Sequence[float]]) -> float:
        worst = 0.0
        live = [c for c in self.components if not c.is_zero]
        for p in points:
            for c in live:
                worst = max(worst, abs(evaluate(c, p)))
        return worst

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)


@dataclass(frozen=True)
class ConnectionSymbols:
    """Christoffel symbols Gamma^{ij}_k of a linear contravariant connection."""

    dim: int
    symbols: Tuple[Tuple[Tuple[Expr, ...], ...], ...]
    provenance: str = "explicit"

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        m = self.dim
        if len(self.symbols) != m or any(len(row) != m or any(len(col) != m for col in row) for row in self.symbols):
            raise ValueError(f"symbols must be a {m} x {m} x {m} array")

    @classmethod
    def build(cls, dim: int, fn: Callable[[int, int, int], Expr], provenance: str = "explicit") -> "ConnectionSymbols":
        return cls(dim, tuple(
            tuple(tuple(as_expr(fn(i, j, k)) for k in range(dim)) for j in range(dim)) for i in range(dim)
        ), provenance)

    @classmethod
    def from_sparse(cls, dim: int, entries: dict, provenance: str = "explicit") -> "ConnectionSymbols":
        """entries {(i, j, k): Expr} 0-based; everything else zero."""
        return cls.build(dim, lambda i, j, k: entries.get((i, j, k), ZERO), provenance)

    def gamma(self, i: int, j: int, k: int) -> Expr:
        return self.symbols[i][j][k]

    def at(self, point: Sequence[float]) -> np.ndarray:
        """Numeric array G[i, j, k] = Gamma^{ij}_k(x)."""
        m = self.dim
        out = np.zeros((m, m, m))
        for i, j, k in product(range(m), repeat=3):
            g = self.symbols[i][j][k]
            if not g.is_zero:
                out[i, j, k] = evaluate(g, point)
        return out

    @property
    def is_zero(self) -> bool:
        return all(g.is_zero for row in self.symbols for col in row for g in col)

    def nonzero(self) -> List[Tuple[Tuple[int, int, int], Expr]]:
        m = self.dim
        return [((i, j, k), self.symbols[i][j][k]) for i, j, k in product(range(m), repeat=3)
                if not self.symbols[i][j][k].is_zero]

    def to_dict(self) -> dict:
        return {f"{i + 1}.{j + 1}.{k + 1}": to_text(g) for (i, j, k), g in self.nonzero()}


def transport_generator(symbols_at: np.ndarray, alpha: Sequence[float]) -> np.ndarray:
    """M(a)[j, l] = sum_k a_k Gamma^{kl}_j, so (D_a b)_j = #a(b_j) + (M(a) b)_j."""
    return np.einsum("k,klj->jl", np.asarray(alpha, dtype=float), symbols_at)


@dataclass(frozen=True)
class Metric:
    """Symmetric Expr matrix g_ij."""

    dim: int
    entries: Tuple[Tuple[Expr, ...], ...]

    def __post_init__(self):
        m = self.dim
        if len(self.entries) != m or any(len(row) != m for row in self.entries):
            raise ValueError(f"metric must be {m} x {m}")
        for i in range(m):
            for j in range(i + 1, m):
                if self.entries[i][j] != self.entries[j][i]:
                    raise MetricError(f"metric is not symmetric at ({i + 1}, {j + 1})")

    @classmethod
    def from_upper(cls, dim: int, upper: dict) -> "Metric":
        """upper {(i, j): Expr} with i <= j, 0-based."""
        rows = []
        for i in range(dim):
            row = []
            for j in range(dim):
                key = (i, j) if i <= j else (j, i)
                row.append(as_expr(upper.get(key, ZERO)))
            rows.append(tuple(row))
        return cls(dim, tuple(rows))

    @classmethod
    def euclidean(cls, dim: int) -> "Metric":
        return cls.from_upper(dim, {(i, i): 1.0 for i in range(dim)})

    def g(self, i: int, j: int) -> Expr:
        return self.entries[i][j]

    def at(self, point: Sequence[float]) -> np.ndarray:
        return np.array([[evaluate(e, point) for e in row] for row in self.entries], dtype=float)

    def check(self, points: Iterable[Sequence[float]]) -> None:
        """Raises MetricError unless g is positive-definite at every point."""
        for p in points:
            try:
                np.linalg.cholesky(self.at(p))
            except EvaluationError as e:
                raise MetricError(f"metric not evaluable at {list(p)}: {e}") from e
            except np.linalg.LinAlgError:
                raise MetricError(f"metric is not positive-definite at {list(p)}") from None
