"""
Alternating Fields on a Chart
=============================

Poisson bivectors, multivector fields, differential forms and densities on a
single coordinate chart. Components are Expr trees keyed by strictly
increasing 0-based index tuples; any other tuple is resolved by sorting with
the permutation sign (repeated indices give zero).

Evaluation on covectors uses the determinant convention:

    Q(a_1, ..., a_r) = sum_I Q^I det[a_p(I_q)]

so that Q(dx^i1, ..., dx^ir) = Q^{i1...ir}.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.expr import ZERO, Expr, EvaluationError, add, as_expr, evaluate, mul, neg, to_text

logger = logging.getLogger(__name__)

Index = Tuple[int, ...]


class DimensionMismatchError(ValueError):
    def __init__(self, expected: int, got: int, what: str = "field"):
        self.expected = expected
        self.got = got
        super().__init__(f"{what} has dimension {got}, expected {expected}")


class DensityError(ValueError):
    """Density weight is not strictly positive at a sampled point."""


def sort_with_sign(indices: Sequence[int]) -> Tuple[int, Optional[Index]]:
    """Sort an index tuple, returning (sign, sorted) or (0, None) on repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


def increasing_tuples(dim: int, degree: int) -> List[Index]:
    return list(combinations(range(dim), degree))


@dataclass(frozen=True)
class AlternatingField:
    """Sparse antisymmetric component map shared by multivectors and forms."""

    degree: int
    dim: int
    components: Mapping[Index, Expr] = field(default_factory=dict)

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError(f"degree must be >= 0, got {self.degree}")
        cleaned: Dict[Index, Expr] = {}
        for key, value in self.components.items():
            key = tuple(key)
            if len(key) != self.degree:
                raise ValueError(f"component {key} does not have degree {self.degree}")
            if any(k < 0 or k >= self.dim for k in key):
                raise ValueError(f"component {key} out of range for dimension {self.dim}")
            if any(key[a] >= key[a + 1] for a in range(len(key) - 1)):
                raise ValueError(f"component {key} is not strictly increasing")
            if not value.is_zero:
                cleaned[key] = value
        object.__setattr__(self, "components", cleaned)

    # --- construction ---

    @classmethod
    def from_any(cls, degree: int, dim: int, entries: Mapping[Sequence[int], Expr]):
        """Build from arbitrary index tuples, folding permutations by sign."""
        acc: Dict[Index, List[Expr]] = {}
        for key, value in entries.items():
            sign, ordered = sort_with_sign(key)
            if sign == 0:
                continue
            acc.setdefault(ordered, []).append(value if sign > 0 else neg(value))
        return cls(degree, dim, {k: add(*v) for k, v in acc.items()})

    @classmethod
    def zero(cls, degree: int, dim: int):
        return cls(degree, dim, {})

    @classmethod
    def scalar(cls, dim: int, value: Expr):
        return cls(0, dim, {(): value})

    @classmethod
    def from_list(cls, dim: int, values: Sequence[Expr]):
        """Degree-1 field from its m components."""
        if len(values) != dim:
            raise DimensionMismatchError(dim, len(values), "component list")
        return cls(1, dim, {(k,): as_expr(v) for k, v in enumerate(values)})

    # --- access ---

    def component(self, indices: Sequence[int]) -> Expr:
        sign, ordered = sort_with_sign(indices)
        if sign == 0:
            return ZERO
        value = self.components.get(ordered, ZERO)
        return value if sign > 0 else neg(value)

    def __getitem__(self, indices) -> Expr:
        if isinstance(indices, int):
            indices = (indices,)
        return self.component(indices)

    def as_list(self) -> List[Expr]:
        """Components of a degree-1 field in index order."""
        if self.degree != 1:
            raise ValueError("as_list needs a degree-1 field")
        return [self.components.get((k,), ZERO) for k in range(self.dim)]

    @property
    def is_zero(self) -> bool:
        return not self.components

    def _same_shape(self, other: "AlternatingField") -> None:
        if other.dim != self.dim:
            raise DimensionMismatchError(self.dim, other.dim)
        if other.degree != self.degree:
            raise ValueError(f"degree {other.degree} does not match {self.degree}")

    # --- linear structure ---

    def __add__(self, other: "AlternatingField"):
        self._same_shape(other)
        keys = set(self.components) | set(other.components)
        return type(self)(self.degree, self.dim, {
            k: add(self.components.get(k, ZERO), other.components.get(k, ZERO)) for k in keys
        })

    def __neg__(self):
        return type(self)(self.degree, self.dim, {k: neg(v) for k, v in self.components.items()})

    def __sub__(self, other: "AlternatingField"):
        return self + (-other)

    def scale(self, factor) -> "AlternatingField":
        factor = as_expr(factor)
        return type(self)(self.degree, self.dim, {k: mul(factor, v) for k, v in self.components.items()})

    # --- numeric evaluation ---

    def values_at(self, point: Sequence[float]) -> Dict[Index, float]:
        return {k: evaluate(v, point) for k, v in self.components.items()}

    def evaluate_on(self, point: Sequence[float], covectors: Sequence[Sequence[float]] = ()) -> float:
        """Value on r covectors at a point (determinant convention)."""
        if len(covectors) != self.degree:
            raise ValueError(f"expected {self.degree} covectors, got {len(covectors)}")
        if self.degree == 0:
            value = self.components.get(())
            return 0.0 if value is None else evaluate(value, point)
        a = np.asarray(covectors, dtype=float)
        if a.shape[1] != self.dim:
            raise DimensionMismatchError(self.dim, a.shape[1], "covector")
        total = 0.0
        for key in sorted(self.components):
            minor = a[:, list(key)]
            total += evaluate(self.components[key], point) * float(np.linalg.det(minor))
        return total

    def vector_at(self, point: Sequence[float]) -> np.ndarray:
        """Dense components of a degree-1 field."""
        out = np.zeros(self.dim)
        for (k,), v in self.components.items():
            out[k] = evaluate(v, point)
        return out

    def max_abs(self, points: Iterable[Sequence[float]]) -> float:
        """Largest absolute component over sample points (0 for the zero field)."""
        worst = 0.0
        for p in points:
            for v in self.components.values():
                worst = max(worst, abs(evaluate(v, p)))
        return worst

    def to_dict(self) -> Dict[str, str]:
        return {".".join(str(i + 1) for i in k): to_text(v) for k, v in sorted(self.components.items())}


class MultiVectorField(AlternatingField):
    """Degree-r multivector field; degree 0 is a function, degree 1 a vector field."""


class DifferentialForm(AlternatingField):
    """Degree-r differential form."""


@dataclass(frozen=True)
class PoissonStructure:
    """
    Bivector pi^{ij} on an m-dimensional chart.

    Only i < j entries are stored; pi^{ji} = -pi^{ij} and pi^{ii} = 0.
    """

    dim: int
    components: Mapping[Tuple[int, int], Expr] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dimension must be positive, got {self.dim}")
        cleaned = {}
        for (i, j), value in self.components.items():
            if not i < j:
                raise ValueError(f"indices must satisfy i<j, got ({i + 1}, {j + 1})")
            if j >= self.dim:
                raise ValueError(f"index {j + 1} out of range for dimension {self.dim}")
            if not value.is_zero:
                cleaned[(i, j)] = value
        object.__setattr__(self, "components", cleaned)
        object.__setattr__(self, "_matrix", None)

    def entry(self, i: int, j: int) -> Expr:
        if i == j:
            return ZERO
        if i < j:
            return self.components.get((i, j), ZERO)
        return neg(self.components.get((j, i), ZERO))

    def matrix(self) -> List[List[Expr]]:
        if self._matrix is None:
            object.__setattr__(self, "_matrix", [[self.entry(i, j) for j in range(self.dim)] for i in range(self.dim)])
        return self._matrix

    def at(self, point: Sequence[float]) -> np.ndarray:
        """Numeric antisymmetric matrix pi(x)."""
        out = np.zeros((self.dim, self.dim))
        for (i, j), v in self.components.items():
            value = evaluate(v, point)
            out[i, j] = value
            out[j, i] = -value
        return out

    def as_bivector(self) -> MultiVectorField:
        return MultiVectorField(2, self.dim, dict(self.components))

    def __str__(self) -> str:
        label = self.name or "pi"
        return f"{label} (dim {self.dim}, {len(self.components)} nonzero entries)"


@dataclass(frozen=True)
class DensityField:
    """mu = weight * dx^1 ^ ... ^ dx^m with weight > 0 on the chart."""

    weight: Expr

    def check(self, points: Iterable[Sequence[float]]) -> None:
        for p in points:
            try:
                value = evaluate(self.weight, p)
            except EvaluationError as e:
                raise DensityError(f"density weight not evaluable at {list(p)}: {e}") from e
            if value <= 0.0:
                raise DensityError(f"density weight {value!r} is not positive at {list(p)}")
