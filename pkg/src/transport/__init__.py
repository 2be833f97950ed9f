from src.transport.paths import (
    CotangentPath,
    PiecewisePath,
    Path,
    PathError,
    concatenate,
    check_cotangent,
    require_cotangent,
    is_closed,
)
from src.transport.integrator import Trajectory, rk4, richardson_endpoint, quadrature
from src.transport.geodesic import GeodesicResult, integrate_geodesic, geodesic_endpoint_oracle
from src.transport.holonomy import (
    HolonomyResult,
    FlowResult,
    transport_matrix,
    parallel_transport_covector,
    parallel_transport_vector,
    conormal_restriction,
    linear_holonomy,
    zero_leaf_holonomy_flow,
    automorphism_residual,
    line_integral,
)

__all__ = [
    "CotangentPath", "PiecewisePath", "Path", "PathError", "concatenate", "check_cotangent",
    "require_cotangent", "is_closed",
    "Trajectory", "rk4", "richardson_endpoint", "quadrature",
    "GeodesicResult", "integrate_geodesic", "geodesic_endpoint_oracle",
    "HolonomyResult", "FlowResult", "transport_matrix", "parallel_transport_covector",
    "parallel_transport_vector", "conormal_restriction", "linear_holonomy",
    "zero_leaf_holonomy_flow", "automorphism_residual", "line_integral",
]
