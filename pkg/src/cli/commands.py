"""
Commands
========

One function per CLI command. Each takes the parsed manifest and a RunContext
and returns a ReportDocument; records carrying a tolerance decide the exit code.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from src.classes import (
    LIE_POISSON_RATIOS,
    closedness_residual,
    lie_poisson_mk,
    modular_comparison,
    secondary_class,
    transgression_residual,
)
from src.cli.manifest import Manifest, ManifestError
from src.cli.report import ReportDocument, write_csv
from src.config import IntegratorConfig, ToleranceConfig
from src.connection import (
    canonical_poisson_connection,
    d_pi_residual,
    flat_connection,
    metric_compatibility_residual,
    torsion,
)
from src.expr import parse_expr
from src.multivec import (
    DifferentialForm,
    MultiVectorField,
    bracket_function_residual,
    cartan_residual,
    contravariant_differential,
    delta_squared_residual,
    is_poisson,
    leibniz_residual,
    modular_vector_field,
    musical_residual,
)
from src.transport import (
    check_cotangent,
    integrate_geodesic,
    line_integral,
    linear_holonomy,
    parallel_transport_covector,
)
from src.utils.sampling import random_field, random_polynomial

logger = logging.getLogger(__name__)

VALUE_SAMPLES = 5


class UsageError(ValueError):
    """Bad command-line flag values."""


@dataclass
class RunContext:
    seed: int = 0
    points: int = 100
    steps: int = 1000
    low: float = -1.0
    high: float = 1.0
    tolerance: ToleranceConfig = field(default_factory=ToleranceConfig)
    options: Dict[str, object] = field(default_factory=dict)

    @property
    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(steps=self.steps)

    def option(self, name: str, default=None):
        value = self.options.get(name)
        return default if value is None else value


def parse_floats(text: str, dim: int, flag: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated numbers, got {text!r}") from None
    if len(values) != dim:
        raise UsageError(f"{flag} needs {dim} values, got {len(values)}")
    return values


def parse_orders(text: str) -> List[int]:
    try:
        orders = [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--k expects comma-separated integers, got {text!r}") from None
    if any(k < 1 for k in orders):
        raise UsageError("--k values must be >= 1")
    return orders


def _document(command: str, manifest: Manifest, ctx: RunContext) -> ReportDocument:
    return ReportDocument(command, manifest.name, manifest.digest, ctx.seed)


def _field_values(q: MultiVectorField, points: np.ndarray) -> Dict[str, object]:
    return {
        "components": q.to_dict(),
        "samples": [
            {"point": [float(x) for x in p],
             "values": {".".join(str(i + 1) for i in k): v for k, v in sorted(q.values_at(p).items())}}
            for p in points[:VALUE_SAMPLES]
        ],
    }


# ============================================================================
# CHECK
# ============================================================================

def cmd_check(manifest: Manifest, ctx: RunContext) -> ReportDocument:
    """Poisson property battery on a seeded sample."""
    doc = _document("check", manifest, ctx)
    tol = ctx.tolerance
    pi = manifest.pi
    m = pi.dim
    points = manifest.sample(ctx.points, ctx.seed, ctx.low, ctx.high)

    _, jacobi = is_poisson(pi, points, tol.jacobi)
    doc.add("jacobi", residual=jacobi, tolerance=tol.jacobi)
    doc.add("delta_pi", residual=contravariant_differential(pi, pi.as_bivector()).max_abs(points),
            tolerance=tol.identity)

    rng = np.random.default_rng(ctx.seed)
    for degree in range(m):
        q = random_field(MultiVectorField, degree, m, rng)
        doc.add(f"delta_squared_degree_{degree}", residual=delta_squared_residual(pi, q, points),
                tolerance=tol.identity)

    q1 = random_field(MultiVectorField, 1, m, rng)
    q2 = random_field(MultiVectorField, 1 if m >= 3 else 0, m, rng)
    doc.add("leibniz", residual=leibniz_residual(pi, q1, q2, points), tolerance=tol.identity)

    alpha = random_field(DifferentialForm, 1, m, rng)
    beta = random_field(DifferentialForm, 1, m, rng)
    q = random_field(MultiVectorField, min(2, m), m, rng)
    doc.add("cartan", residual=cartan_residual(pi, alpha, q, points), tolerance=tol.identity)
    doc.add("musical_homomorphism", residual=musical_residual(pi, alpha, beta, points), tolerance=tol.identity)
    f = random_polynomial(m, rng)
    doc.add("bracket_with_function", residual=bracket_function_residual(pi, alpha, beta, f, points),
            tolerance=tol.identity)

    conn = manifest.connection()
    doc.add("connection", value=manifest.connection_type)
    doc.add("torsion_max", value=torsion(pi, conn).max_abs(points))
    doc.add("d_pi_max", value=d_pi_residual(pi, conn).max_abs(points))

    if manifest.metric is not None:
        manifest.metric.check(points)
        doc.add("metric_compatibility", residual=metric_compatibility_residual(manifest.metric, points),
                tolerance=tol.operator)
    if manifest.algebra is not None:
        doc.add("lie_algebra_jacobi", residual=manifest.algebra.jacobi_residual(), tolerance=1e-12)
    for name, path in sorted(manifest.paths.items()):
        doc.add(f"path_{name}_cotangent", residual=check_cotangent(pi, path), tolerance=tol.cotangent)
    logger.info(f"check {manifest.name}: {'pass' if doc.passed else 'FAIL'} ({len(doc.records)} records)")
    return doc


# ============================================================================
# ODE COMMANDS
# ============================================================================

def cmd_geodesic(manifest: Manifest, ctx: RunContext) -> ReportDocument:
    doc = _document("geodesic", manifest, ctx)
    m = manifest.dim
    x0 = parse_floats(ctx.option("x0", ",".join(["0"] * m)), m, "--x0")
    alpha0 = parse_floats(ctx.option("alpha0", ",".join(["0"] * m)), m, "--alpha0")
    horizon = float(ctx.option("T", 1.0))
    result = integrate_geodesic(manifest.pi, manifest.connection(), x0, alpha0, horizon, ctx.integrator)
    doc.add("geodesic", value=result.to_dict())
    out = ctx.option("out")
    if out:
        header = ["t"] + [f"x{i + 1}" for i in range(m)] + [f"a{i + 1}" for i in range(m)]
        write_csv(out, header, result.csv_rows())
    return doc


def cmd_transport(manifest: Manifest, ctx: RunContext) -> ReportDocument:
    doc = _document("transport", manifest, ctx)
    path = manifest.path(ctx.option("path", "loop"))
    beta0 = parse_floats(ctx.option("beta0", ",".join(["1"] * manifest.dim)), manifest.dim, "--beta0")
    tol = ctx.tolerance
    doc.add("path_cotangent", residual=check_cotangent(manifest.pi, path), tolerance=tol.cotangent)
    beta = parallel_transport_covector(manifest.pi, manifest.connection(), path, beta0, ctx.integrator, tol.cotangent)
    doc.add("covector", value={"start": beta0, "end": [float(v) for v in beta]})
    return doc


def cmd_holonomy(manifest: Manifest, ctx: RunContext) -> ReportDocument:
    """Linear holonomy of a closed path and the determinant comparison with exp(int v_mu)."""
    doc = _document("holonomy", manifest, ctx)
    path = manifest.path(ctx.option("path", "loop"))
    result = linear_holonomy(manifest.pi, manifest.connection(), path, ctx.integrator, ctx.tolerance.cotangent)
    doc.add("holonomy", value=result.to_dict())
    if manifest.density is not None or manifest.metric is not None:
        v_mu = modular_vector_field(manifest.pi, manifest.density_field(), [path.position(0.0)])
        integral = line_integral(v_mu, path, ctx.integrator)
        doc.add("modular_line_integral", value=integral)
        doc.add("determinant_vs_exp_integral", value=math.exp(integral),
                residual=abs(result.determinant - math.exp(integral)), tolerance=ctx.tolerance.holonomy)
    return doc


def cmd_integral(manifest: Manifest, ctx: RunContext) -> ReportDocument:
    doc = _document("integral", manifest, ctx)
    path = manifest.path(ctx.option("path", "loop"))
    spec: Optional[str] = ctx.option("field")
    if spec:
        parts = spec.split(",")
        if len(parts) != manifest.dim:
            raise UsageError(f"--field needs {manifest.dim} components, got {len(parts)}")
        x = MultiVectorField.from_list(manifest.dim, [parse_expr(p, manifest.dim) for p in parts])
        label = "field"
    else:
        x = modular_vector_field(manifest.pi, manifest.density_field())
        label = "modular_vector_field"
    doc.add("path_cotangent", residual=check_cotangent(manifest.pi, path), tolerance=ctx.tolerance.cotangent)
    doc.add("line_integral", value={"integrand": label, "components": x.to_dict(),
                                    "value": line_integral(x, path, ctx.integrator)})
    return doc


# ============================================================================
# CLASSES
# ============================================================================

def cmd_classes(manifest: Manifest, ctx: RunContext) -> ReportDocument:
    doc = _document("classes", manifest, ctx)
    tol = ctx.tolerance
    pi = manifest.pi
    points = manifest.sample(ctx.points, ctx.seed, ctx.low, ctx.high)
    d1, d0 = manifest.connection_pair()
    for k in parse_orders(ctx.option("k", "1")):
        try:
            mk = secondary_class(pi, d1, d0, k, points)
        except ValueError as e:
            doc.add(f"m{k}", value={"computed": False, "reason": str(e)})
            continue
        doc.add(f"m{k}", value=_field_values(mk, points))
        if 2 * k <= pi.dim:
            doc.add(f"chern_weil_{k}_closed", residual=closedness_residual(pi, d1, k, points), tolerance=tol.classes)
            if k % 2 == 1:
                doc.add(f"m{k}_transgression", residual=transgression_residual(pi, d1, d0, k, points),
                        tolerance=tol.classes)
        if manifest.algebra is not None and k in LIE_POISSON_RATIOS:
            closed = lie_poisson_mk(manifest.algebra, k).scale(LIE_POISSON_RATIOS[k])
            direct = mk
            if manifest.metric is not None:
                direct = secondary_class(pi, canonical_poisson_connection(pi), flat_connection(pi.dim), k, points)
            doc.add(f"m{k}_closed_form", value={"ratio": LIE_POISSON_RATIOS[k], "components": closed.to_dict()},
                    residual=(direct - closed).max_abs(points), tolerance=tol.classes)
    return doc


def cmd_modular(manifest: Manifest, ctx: RunContext) -> ReportDocument:
    doc = _document("modular", manifest, ctx)
    if manifest.metric is None and manifest.density is None:
        raise ManifestError("modular needs a metric or density section")
    points = manifest.sample(ctx.points, ctx.seed, ctx.low, ctx.high)
    v_mu = modular_vector_field(manifest.pi, manifest.density_field(), points)
    doc.add("modular_vector_field", value=_field_values(v_mu, points))
    if manifest.metric is not None:
        residual = modular_comparison(manifest.pi, manifest.metric, points)
        doc.add("first_class_vs_modular", residual=residual, tolerance=ctx.tolerance.modular)
    return doc


COMMANDS: Dict[str, Callable[[Manifest, RunContext], ReportDocument]] = {
    "check": cmd_check,
    "geodesic": cmd_geodesic,
    "transport": cmd_transport,
    "holonomy": cmd_holonomy,
    "classes": cmd_classes,
    "modular": cmd_modular,
    "integral": cmd_integral,
}
