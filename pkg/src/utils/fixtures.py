"""
Built-in Example Structures
===========================

Named Poisson charts used by the test batteries and as CLI defaults.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from src.classes.lie_algebra import LieAlgebra, aff1, sl2, so3, solvable3
from src.expr import Expr, parse_expr
from src.multivec import PoissonStructure


@dataclass
class Fixture:
    """A Poisson chart with known Casimirs and (for linear structures) its algebra."""
    name: str
    pi: PoissonStructure
    casimirs: List[Expr] = field(default_factory=list)
    algebra: Optional[LieAlgebra] = None

    @property
    def dim(self) -> int:
        return self.pi.dim

    @property
    def is_lie_poisson(self) -> bool:
        return self.algebra is not None


def poisson_from_strings(dim: int, entries: Dict[str, str], name: str = "") -> PoissonStructure:
    """entries like {"1.2": "x3"} with 1-based i<j."""
    comps = {}
    for key, text in entries.items():
        i, j = (int(s) - 1 for s in key.split("."))
        comps[(i, j)] = parse_expr(text, dim)
    return PoissonStructure(dim, comps, name=name)


def so3_fixture() -> Fixture:
    g = so3()
    return Fixture("so3", g.poisson_structure(), [parse_expr("x1^2 + x2^2 + x3^2", 3)], g)


def aff1_fixture() -> Fixture:
    g = aff1()
    return Fixture("aff1", g.poisson_structure(), [], g)


def sl2_fixture() -> Fixture:
    g = sl2()
    # Casimir of sl(2)* in the (h, e, f) coordinates
    return Fixture("sl2", g.poisson_structure(), [parse_expr("x1^2 + 4*x2*x3", 3)], g)


def solvable_fixture() -> Fixture:
    g = solvable3()
    return Fixture("solv3", g.poisson_structure(), [], g)


def so3_aff1_fixture() -> Fixture:
    g = so3().direct_sum(aff1())
    return Fixture("so3+aff1", g.poisson_structure(), [parse_expr("x1^2 + x2^2 + x3^2", 5)], g)


def symplectic_fixture() -> Fixture:
    return Fixture("symplectic", poisson_from_strings(2, {"1.2": "1"}, "symplectic"))


def quadratic_fixture() -> Fixture:
    return Fixture("quadratic", poisson_from_strings(2, {"1.2": "x1*x2"}, "quadratic"))


def non_jacobi_fixture() -> Fixture:
    """Bivector failing the Jacobi identity: J^{123} = -x1."""
    return Fixture("non_jacobi", poisson_from_strings(3, {"1.2": "1", "2.3": "x1*x2"}, "non_jacobi"))


POISSON_FIXTURES = {
    "so3": so3_fixture,
    "aff1": aff1_fixture,
    "sl2": sl2_fixture,
    "symplectic": symplectic_fixture,
    "quadratic": quadratic_fixture,
}

LIE_POISSON_FIXTURES = {
    "so3": so3_fixture,
    "aff1": aff1_fixture,
    "sl2": sl2_fixture,
    "solv3": solvable_fixture,
    "so3+aff1": so3_aff1_fixture,
}
