"""Redundancy of pointer-state records in mixed good/bad spin environments.

Three mutually validating routes to the same physics: exact combinatorial
fragment averaging (`fragments`), Chernoff-bound asymptotics (`qcb`), and a
brute-force dense-state oracle (`oracle`).
"""

from .errors import (
    DarwinismError,
    DeficitUnreachableError,
    OracleCapError,
    SpecValidationError,
)
from .fragments import (
    InfoCurve,
    MonteCarloEstimate,
    RedundancyReport,
    avg_holevo_exact,
    crossing_fragment_size,
    find_fragment_size,
    info_curve,
    mc_avg_holevo,
    p_all_bad,
    redundancy_avg,
    redundancy_max,
    redundancy_report,
    stirling_fragment_size,
)
from .info import binary_entropy, holevo_from_overlap
from .model import (
    DeficitSpec,
    EnvironmentSpec,
    FragmentComposition,
    fragment_overlap,
    hypergeometric_pmf,
    validate_spec,
)
from .qcb import (
    ChernoffExponent,
    definition_ratio,
    error_probability,
    holevo_asymptotic,
    redundancy_goodbad_expanded,
    redundancy_max_qcb,
    redundancy_qcb,
    typical_chernoff,
)

__all__ = [
    "DarwinismError",
    "DeficitUnreachableError",
    "OracleCapError",
    "SpecValidationError",
    "EnvironmentSpec",
    "FragmentComposition",
    "DeficitSpec",
    "validate_spec",
    "hypergeometric_pmf",
    "fragment_overlap",
    "binary_entropy",
    "holevo_from_overlap",
    "InfoCurve",
    "MonteCarloEstimate",
    "RedundancyReport",
    "p_all_bad",
    "avg_holevo_exact",
    "find_fragment_size",
    "crossing_fragment_size",
    "redundancy_avg",
    "redundancy_max",
    "mc_avg_holevo",
    "stirling_fragment_size",
    "info_curve",
    "redundancy_report",
    "ChernoffExponent",
    "typical_chernoff",
    "error_probability",
    "holevo_asymptotic",
    "redundancy_qcb",
    "redundancy_goodbad_expanded",
    "redundancy_max_qcb",
    "definition_ratio",
]

__version__ = "0.1.0"
