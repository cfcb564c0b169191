"""Achievable-rate-region toolkit for a two-sender two-receiver channel
with a common message and a cognitive (message-aware) encoder.

Submodules: probability (joints, entropy, mutual information), polytope
(exact-rational inequality systems, elimination, vertices), bounds (the
sixteen rate-bound constants and the five-rate system), regions (three-rate
region, mechanical verification, special cases, union scans), binning
(encoder covering simulation), files (JSON/CSV formats), cli.
"""

from .binning import Codebook, CodebookTooLarge, SimConfig
from .bounds import BoundConstants, bound_constants, theorem1_system
from .polytope import Inequality, LinearSystem, RegionReport, VertexSet
from .probability import (
    Factor,
    FactorizationSpec,
    JointPmf,
    PmfError,
    build_joint,
    cond_mutual_information,
    entropy,
    marginalize,
)
from .regions import (
    ScanResult,
    StrongInterferenceViolated,
    WrongFactorization,
    cmacc_region,
    scan_union,
    sicc_condition,
    sicc_region,
    theorem2_region,
    verify_appendix_a,
    verify_reduction,
    verify_theorem2,
)

__all__ = [
    "BoundConstants", "Codebook", "CodebookTooLarge", "Factor",
    "FactorizationSpec", "Inequality", "JointPmf", "LinearSystem",
    "PmfError", "RegionReport", "ScanResult", "SimConfig",
    "StrongInterferenceViolated", "VertexSet", "WrongFactorization",
    "bound_constants", "build_joint", "cmacc_region",
    "cond_mutual_information", "entropy", "marginalize", "scan_union",
    "sicc_condition", "sicc_region", "theorem1_system", "theorem2_region",
    "verify_appendix_a", "verify_reduction", "verify_theorem2",
]

__version__ = "0.1.0"
