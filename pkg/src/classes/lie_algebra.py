"""
Lie Algebras
============

Finite-dimensional real Lie algebras by structure constants, their adjoint
matrices and the induced linear (Lie-Poisson) structure on the dual.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Mapping, Sequence, Tuple

import numpy as np

from src.expr import coordinate, mul, const, total
from src.multivec import PoissonStructure

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LieAlgebra:
    """
    Structure constants c[i, j, k] = c^k_{ij}, i.e. [e_i, e_j] = sum_k c^k_{ij} e_k.
    """

    constants: np.ndarray
    name: str = ""

    def __post_init__(self):
        c = np.asarray(self.constants, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise ValueError(f"structure constants must be n x n x n, got shape {c.shape}")
        object.__setattr__(self, "constants", c)

    @classmethod
    def from_brackets(cls, dim: int, brackets: Mapping[Tuple[int, int], Mapping[int, float]], name: str = "") -> "LieAlgebra":
        """
        Build from nonzero brackets {(i, j): {k: c}} with 0-based i < j.
        """
        c = np.zeros((dim, dim, dim))
        for (i, j), image in brackets.items():
            for k, value in image.items():
                c[i, j, k] = value
                c[j, i, k] = -value
        return cls(c, name)

    @property
    def dim(self) -> int:
        return self.constants.shape[0]

    def antisymmetry_residual(self) -> float:
        return float(np.max(np.abs(self.constants + self.constants.transpose(1, 0, 2)), initial=0.0))

    def jacobi_residual(self) -> float:
        c = self.constants
        # sum_m c^m_{ij} c^l_{mk}, cyclic in (i, j, k)
        term = np.einsum("ijm,mkl->ijkl", c, c)
        cyclic = term + term.transpose(1, 2, 0, 3) + term.transpose(2, 0, 1, 3)
        return float(np.max(np.abs(cyclic), initial=0.0))

    def validate(self, tol: float = 1e-12) -> bool:
        anti, jac = self.antisymmetry_residual(), self.jacobi_residual()
        if anti > tol:
            logger.error(f"{self.name or 'algebra'}: structure constants not antisymmetric ({anti:.2e})")
            return False
        if jac > tol:
            logger.error(f"{self.name or 'algebra'}: Jacobi identity fails ({jac:.2e})")
            return False
        return True

    def bracket(self, u: Sequence[float], v: Sequence[float]) -> np.ndarray:
        return np.einsum("i,j,ijk->k", np.asarray(u, float), np.asarray(v, float), self.constants)

    def ad(self, v: Sequence[float]) -> np.ndarray:
        """Matrix of ad v: (ad v)[j, l] = sum_k v_k c^j_{kl}."""
        return np.einsum("k,klj->jl", np.asarray(v, float), self.constants)

    def basis(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim)
        e[i] = 1.0
        return e

    def poisson_structure(self) -> PoissonStructure:
        """pi^{ij}(x) = sum_k c^k_{ij} x_k on the dual."""
        n = self.dim
        comps = {}
        for i in range(n):
            for j in range(i + 1, n):
                comps[(i, j)] = total(
                    mul(const(self.constants[i, j, k]), coordinate(k + 1))
                    for k in range(n) if self.constants[i, j, k] != 0.0
                )
        return PoissonStructure(n, comps, name=f"{self.name}*" if self.name else "")

    def direct_sum(self, other: "LieAlgebra") -> "LieAlgebra":
        n, p = self.dim, other.dim
        c = np.zeros((n + p, n + p, n + p))
        c[:n, :n, :n] = self.constants
        c[n:, n:, n:] = other.constants
        name = f"{self.name}+{other.name}" if self.name and other.name else ""
        return LieAlgebra(c, name)

    def to_dict(self) -> Dict[str, float]:
        out = {}
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for k in range(self.dim):
                    if self.constants[i, j, k] != 0.0:
                        out[f"{i + 1}.{j + 1}.{k + 1}"] = float(self.constants[i, j, k])
        return out


def so3() -> LieAlgebra:
    return LieAlgebra.from_brackets(3, {(0, 1): {2: 1.0}, (1, 2): {0: 1.0}, (0, 2): {1: -1.0}}, "so3")


def aff1() -> LieAlgebra:
    return LieAlgebra.from_brackets(2, {(0, 1): {0: 1.0}}, "aff1")


def sl2() -> LieAlgebra:
    """Basis (h, e, f)."""
    return LieAlgebra.from_brackets(3, {(0, 1): {1: 2.0}, (0, 2): {2: -2.0}, (1, 2): {0: 1.0}}, "sl2")


def solvable3() -> LieAlgebra:
    """[e1, e2] = e2, [e1, e3] = e3; tr ad e1 = 2."""
    return LieAlgebra.from_brackets(3, {(0, 1): {1: 1.0}, (0, 2): {2: 1.0}}, "solv3")
