from src.classes.lie_algebra import LieAlgebra, so3, aff1, sl2, solvable3
from src.classes.invariants import (
    sigma_polarized,
    sigma_polarized_expr,
    characteristic_coefficients,
    p3_closed_form,
    K_form,
)
from src.classes.chern_weil import (
    LIE_POISSON_RATIOS,
    chern_weil,
    secondary_class,
    interpolate,
    is_flat,
    transgression_residual,
    closedness_residual,
    lie_poisson_mk,
    modular_comparison,
    euclidean_first_class,
)

__all__ = [
    "LieAlgebra", "so3", "aff1", "sl2", "solvable3",
    "sigma_polarized", "sigma_polarized_expr", "characteristic_coefficients", "p3_closed_form", "K_form",
    "LIE_POISSON_RATIOS", "chern_weil", "secondary_class", "interpolate", "is_flat", "transgression_residual",
    "closedness_residual", "lie_poisson_mk", "modular_comparison", "euclidean_first_class",
]
