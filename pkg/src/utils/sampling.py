"""
Seeded Sampling
===============

Latin-hypercube sample points over a box and random polynomial test data
(functions, forms, multivector fields) for the residual batteries.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np
from scipy.stats import qmc

from src.expr import Expr, const, coordinate, mul, power, total
from src.multivec import AlternatingField, increasing_tuples

logger = logging.getLogger(__name__)


def sample_points(
    dim: int,
    n: int = 100,
    low: float = -1.0,
    high: float = 1.0,
    seed: int = 0,
    lows: Optional[Sequence[float]] = None,
    highs: Optional[Sequence[float]] = None,
) -> np.ndarray:
    """n Latin-hypercube points in the box [low, high]^dim (or per-axis bounds)."""
    if dim < 1 or n < 1:
        raise ValueError(f"need dim >= 1 and n >= 1, got dim={dim}, n={n}")
    lo = np.asarray(lows if lows is not None else [low] * dim, dtype=float)
    hi = np.asarray(highs if highs is not None else [high] * dim, dtype=float)
    if np.any(lo >= hi):
        raise ValueError(f"empty sample region: low={lo.tolist()} high={hi.tolist()}")
    sampler = qmc.LatinHypercube(d=dim, seed=seed)
    unit = sampler.random(n)
    points = qmc.scale(unit, lo, hi)
    logger.debug(f"sampled {n} points in dim {dim} (seed {seed})")
    return points


def random_polynomial(dim: int, rng: np.random.Generator, max_degree: int = 2, terms: int = 3) -> Expr:
    """Sum of a few monomials with coefficients in [-1, 1]."""
    monomials = []
    for _ in range(terms):
        coeff = const(round(float(rng.uniform(-1.0, 1.0)), 3))
        factors = [coeff]
        for k in range(dim):
            e = int(rng.integers(0, max_degree + 1))
            if e:
                factors.append(power(coordinate(k + 1), e))
        monomials.append(mul(*factors))
    return total(monomials)


def random_field(cls, degree: int, dim: int, rng: np.random.Generator, max_degree: int = 2) -> AlternatingField:
    """Random polynomial multivector field or form of the given class."""
    return cls(degree, dim, {
        idx: random_polynomial(dim, rng, max_degree) for idx in increasing_tuples(dim, degree)
    })


def random_covectors(dim: int, count: int, rng: np.random.Generator) -> List[np.ndarray]:
    return [rng.uniform(-1.0, 1.0, size=dim) for _ in range(count)]
