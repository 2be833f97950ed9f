from src.connection.tensors import (
    TensorField,
    ConnectionSymbols,
    Metric,
    MetricError,
    transport_generator,
)
from src.connection.symbols import (
    canonical_poisson_connection,
    flat_connection,
    symmetrize,
    inverse_metric,
    levi_civita_symbols,
    levi_civita_contra,
    metric_compatibility_residual,
    volume_weight,
    literal_example_connection,
    corrected_example_connection,
    transform_symbols_at,
)
from src.connection.derivative import (
    contra_derivative,
    derivative_of_form,
    form_as_tensor,
    tensor_as_form,
    torsion,
    curvature,
    torsion_operator,
    curvature_operator,
    contract_torsion,
    contract_curvature,
    curvature_matrix,
    d_pi_residual,
    first_bianchi,
)

__all__ = [
    "TensorField", "ConnectionSymbols", "Metric", "MetricError", "transport_generator",
    "canonical_poisson_connection", "flat_connection", "symmetrize", "inverse_metric",
    "levi_civita_symbols", "levi_civita_contra", "metric_compatibility_residual", "volume_weight",
    "literal_example_connection", "corrected_example_connection", "transform_symbols_at",
    "contra_derivative", "derivative_of_form", "form_as_tensor", "tensor_as_form",
    "torsion", "curvature", "torsion_operator", "curvature_operator",
    "contract_torsion", "contract_curvature", "curvature_matrix", "d_pi_residual", "first_bianchi",
]
