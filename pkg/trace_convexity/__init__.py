"""
trace-convexity - Numerical tests of joint convexity and concavity of trace functionals

This package evaluates Tr[(A^{q/2} B^p A^{q/2})^s] and its relatives on
positive definite matrices, classifies exponents (p, q, s) against the known
convexity and concavity regions, searches randomly for violations, replays
explicit counterexamples and checks data processing for the alpha-z Renyi
entropies.

Main entry points:
- classify / classify_convexity / classify_concavity: known region of (p, q, s)
- probe_trace_convexity and friends: randomized midpoint tests with witnesses
- region_scan: classify and probe a whole (p, q, s) grid
- ConstructionCatalog: the explicit counterexample constructions
- dpi_check / dpi_scan: data-processing inequality under random channels

Example usage:
    from trace_convexity import ParamPoint, ProbeConfig, classify, probe_trace_convexity

    params = ParamPoint.parse("2", "-1/2", "2/3")
    print(classify(params).convexity.status)   # proven_convex

    verdict = probe_trace_convexity(params, ProbeConfig(dim=3, trials=500, seed=7))
    assert not verdict.violated
"""

__version__ = "1.0.0"
__author__ = "trace-convexity contributors"
__email__ = ""
__description__ = "Numerical tests of joint convexity and concavity of matrix trace functionals"

from .errors import (
    ConsistencyError,
    ConvergenceError,
    DomainError,
    ProbeError,
    TraceConvexityError,
)
from .linalg import (
    EigSolver,
    HermitianMatrix,
    PsdMatrix,
    RandomSpec,
    eig,
    is_psd,
    mat_pow,
    polar_dilation,
    random_contraction,
    random_psd,
    random_unitary,
)
from .functionals import (
    ParamPoint,
    TripleParams,
    VariationalMode,
    parse_exponent,
    phi,
    psi,
    psi_sign_flipped,
    renyi_alpha_z,
    sandwich,
    trace_power_variational,
    triple_trace,
)
from .regions import (
    RegionPair,
    RegionStatus,
    RegionVerdict,
    classify,
    classify_concavity,
    classify_convexity,
    classify_operator_map,
    classify_scalar,
    classify_triple,
)
from .probes import (
    ConvexityVerdict,
    Direction,
    GridSpec,
    ProbeConfig,
    RegionReport,
    Witness,
    epstein_probe,
    probe_monotone_chain,
    probe_operator_convexity,
    probe_psi_convexity,
    probe_psi_equivalences,
    probe_trace_convexity,
    probe_triple_convexity,
    region_scan,
)
from .counterexamples import (
    ConstructionCatalog,
    CounterexampleResult,
    LimitReport,
    dilation_limit,
    expose_construction,
    homogeneity_refutation,
    mid_power_counterexample,
    negative_power_counterexample,
    rank_one_reduction,
)
from .channels import (
    DpiConfig,
    DpiReport,
    DpiResult,
    QuantumChannel,
    dpi_check,
    dpi_scan,
    is_known_monotone,
    random_channel,
    random_state,
)
from .session import ExperimentSession, RunManifest
from .report_writers import (
    BaseReportWriter,
    CsvReportWriter,
    JsonReportWriter,
    get_report_writer,
)

__all__ = [
    "TraceConvexityError",
    "DomainError",
    "ConvergenceError",
    "ConsistencyError",
    "ProbeError",
    "EigSolver",
    "HermitianMatrix",
    "PsdMatrix",
    "RandomSpec",
    "eig",
    "is_psd",
    "mat_pow",
    "polar_dilation",
    "random_contraction",
    "random_psd",
    "random_unitary",
    "ParamPoint",
    "TripleParams",
    "VariationalMode",
    "parse_exponent",
    "phi",
    "psi",
    "psi_sign_flipped",
    "renyi_alpha_z",
    "sandwich",
    "trace_power_variational",
    "triple_trace",
    "RegionPair",
    "RegionStatus",
    "RegionVerdict",
    "classify",
    "classify_concavity",
    "classify_convexity",
    "classify_operator_map",
    "classify_scalar",
    "classify_triple",
    "ConvexityVerdict",
    "Direction",
    "GridSpec",
    "ProbeConfig",
    "RegionReport",
    "Witness",
    "epstein_probe",
    "probe_monotone_chain",
    "probe_operator_convexity",
    "probe_psi_convexity",
    "probe_psi_equivalences",
    "probe_trace_convexity",
    "probe_triple_convexity",
    "region_scan",
    "ConstructionCatalog",
    "CounterexampleResult",
    "LimitReport",
    "dilation_limit",
    "expose_construction",
    "homogeneity_refutation",
    "mid_power_counterexample",
    "negative_power_counterexample",
    "rank_one_reduction",
    "DpiConfig",
    "DpiReport",
    "DpiResult",
    "QuantumChannel",
    "dpi_check",
    "dpi_scan",
    "is_known_monotone",
    "random_channel",
    "random_state",
    "ExperimentSession",
    "RunManifest",
    "BaseReportWriter",
    "CsvReportWriter",
    "JsonReportWriter",
    "get_report_writer",
]
