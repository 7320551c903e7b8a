"""Symmetric convex bodies, polar duality, and volume-product inequalities."""

from .geometry import (
    Body,
    Ellipsoid,
    LinearMap,
    SimplicialCone,
    SymmetricHPolytope,
    SymmetricVPolytope,
    apply_map,
    ball_approx,
    contains,
    cross_polytope,
    cube,
    dual_cone,
    load_body,
    polar,
    radial,
    random_ellipsoid,
    random_symmetric_polytope,
    save_body,
    support,
    unit_ball_volume,
    vertex_enumeration,
)
from .harness import (
    DeficitReport,
    OrthantRegion,
    ball_deficit,
    chain_consistency,
    cone_restricted_deficit,
    cone_sum_reconstruction,
    directional_deficit,
    directional_product,
    orthant_pair,
    pl_triple_check,
    santalo_deficit,
    save_reports_csv,
    save_reports_jsonl,
    shear_monotonicity,
)
from .isotropic import IsotropicCertificate, isotropize, kls_sandwich_check
from .moments import (
    MomentMatrix,
    ball_functional,
    mc_volume,
    reference_ball_moment,
    second_moment_matrix,
    simplex_second_moment,
    volume,
)
from .stability import (
    StabilityRecord,
    Strip,
    best_fit_ellipsoid,
    fit_loglog_slope,
    homothetic_distance,
    kt_family,
    kt_sweep,
    save_records_csv,
    strip_restricted_diff,
)
from .yaoyao import (
    MeasureSamples,
    YaoYaoPartition,
    assign_cones,
    cone_to_orthant,
    dual_partition,
    load_partition,
    sample_measure,
    save_partition,
    shear_partition,
    shear_to_axis,
    yao_yao_equipartition,
)

__version__ = "0.1.0"

__all__ = [
    "Body",
    "DeficitReport",
    "Ellipsoid",
    "IsotropicCertificate",
    "LinearMap",
    "MeasureSamples",
    "MomentMatrix",
    "OrthantRegion",
    "SimplicialCone",
    "StabilityRecord",
    "Strip",
    "SymmetricHPolytope",
    "SymmetricVPolytope",
    "YaoYaoPartition",
    "apply_map",
    "assign_cones",
    "ball_approx",
    "ball_deficit",
    "ball_functional",
    "best_fit_ellipsoid",
    "chain_consistency",
    "cone_restricted_deficit",
    "cone_sum_reconstruction",
    "cone_to_orthant",
    "contains",
    "cross_polytope",
    "cube",
    "directional_deficit",
    "directional_product",
    "dual_cone",
    "dual_partition",
    "fit_loglog_slope",
    "homothetic_distance",
    "isotropize",
    "kls_sandwich_check",
    "kt_family",
    "kt_sweep",
    "load_body",
    "load_partition",
    "mc_volume",
    "orthant_pair",
    "pl_triple_check",
    "polar",
    "radial",
    "random_ellipsoid",
    "random_symmetric_polytope",
    "reference_ball_moment",
    "sample_measure",
    "santalo_deficit",
    "save_body",
    "save_partition",
    "save_records_csv",
    "save_reports_csv",
    "save_reports_jsonl",
    "second_moment_matrix",
    "shear_monotonicity",
    "shear_partition",
    "shear_to_axis",
    "simplex_second_moment",
    "strip_restricted_diff",
    "support",
    "unit_ball_volume",
    "vertex_enumeration",
    "volume",
    "yao_yao_equipartition",
    "__version__",
]
