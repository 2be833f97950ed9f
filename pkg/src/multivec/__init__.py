from src.multivec.fields import (
    AlternatingField,
    MultiVectorField,
    DifferentialForm,
    PoissonStructure,
    DensityField,
    DimensionMismatchError,
    DensityError,
    sort_with_sign,
    increasing_tuples,
)
from src.multivec.calculus import (
    basis_form,
    differential,
    directional,
    sharp,
    pairing,
    jacobiator,
    poisson_bracket,
    hamiltonian_field,
    koszul_bracket,
    vector_commutator,
    contravariant_differential,
    contract,
    lie_derivative,
    lie_derivative_along,
    sharp_form,
    de_rham,
    interior_vector,
    wedge,
    modular_vector_field,
    is_poisson,
    casimir_residual,
    delta_squared_residual,
    leibniz_residual,
    cartan_residual,
    musical_residual,
    bracket_function_residual,
)

__all__ = [
    "AlternatingField", "MultiVectorField", "DifferentialForm", "PoissonStructure", "DensityField",
    "DimensionMismatchError", "DensityError", "sort_with_sign", "increasing_tuples",
    "basis_form", "differential", "directional", "sharp", "pairing", "jacobiator",
    "poisson_bracket", "hamiltonian_field", "koszul_bracket", "vector_commutator",
    "contravariant_differential", "contract", "lie_derivative", "lie_derivative_along",
    "sharp_form", "de_rham", "interior_vector", "wedge",
    "modular_vector_field", "is_poisson", "casimir_residual",
    "delta_squared_residual", "leibniz_residual", "cartan_residual", "musical_residual",
    "bracket_function_residual",
]
