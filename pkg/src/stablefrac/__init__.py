"""Exact-arithmetic toolkit for many-to-one matching markets.

Stable matchings, the fractional matching polytopes, the strong stability
condition, ordered convex decompositions, rotations, connected-set hulls,
and a brute-force oracle harness that cross-validates all of it.
"""

from .model import (
    AcceptablePairSet,
    AlreadyIntegralError,
    CapExceededError,
    ContestedWorkerError,
    CycleMismatchError,
    Decomposition,
    FractionalMatching,
    InfeasibleError,
    Market,
    MarketError,
    Matching,
    NotStableError,
    NotStronglyStableError,
    OneSidedPreferenceWarning,
    ParseError,
    Rational,
    acceptable_pairs,
    incidence_vector,
    matching_from_matrix,
    parse_fractional,
    parse_market,
    parse_rational,
    serialize_fractional,
    serialize_market,
)
from .stability import (
    BLOCK_SWAP,
    BLOCK_VACANCY,
    BlockingPair,
    Side,
    blocking_pairs,
    check_rural_hospital,
    deferred_acceptance,
    enumerate_stable_bruteforce,
    is_individually_rational,
    is_stable,
)
from .polytope import (
    ConstraintReport,
    check_feasibility,
    check_stable_feasibility,
    constraint_label,
    is_extreme_point,
    vertex_walk,
)
from .strong_stability import (
    DominanceResult,
    PairCondition,
    StrongStabilityReport,
    check_almost_integral,
    decompose,
    dominance_compare,
    firm_strictly_prefers,
    firm_weakly_prefers,
    matching_firm_order,
    peel,
    strong_stability_check,
    support_matching,
)
from .rotations import (
    ReducedProfile,
    Rotation,
    RotationSet,
    apply_cycle,
    apply_cycle_set,
    connected_set,
    enumerate_stable_via_rotations,
    find_cycles,
    reduce_profile,
)
from .hulls import (
    CharacterizationReport,
    HullCertificate,
    StrongStabilityRefusal,
    certify_strongly_stable,
    gen_random_market,
    point_in_hull,
    sample_hull,
    verify_characterization,
)

__version__ = "0.1.0"

__all__ = [
    "AcceptablePairSet",
    "AlreadyIntegralError",
    "BLOCK_SWAP",
    "BLOCK_VACANCY",
    "BlockingPair",
    "CapExceededError",
    "CharacterizationReport",
    "ConstraintReport",
    "ContestedWorkerError",
    "CycleMismatchError",
    "Decomposition",
    "DominanceResult",
    "FractionalMatching",
    "HullCertificate",
    "InfeasibleError",
    "Market",
    "MarketError",
    "Matching",
    "NotStableError",
    "NotStronglyStableError",
    "OneSidedPreferenceWarning",
    "PairCondition",
    "ParseError",
    "Rational",
    "ReducedProfile",
    "Rotation",
    "RotationSet",
    "Side",
    "StrongStabilityReport",
    "StrongStabilityRefusal",
    "acceptable_pairs",
    "apply_cycle",
    "apply_cycle_set",
    "blocking_pairs",
    "certify_strongly_stable",
    "check_almost_integral",
    "check_feasibility",
    "check_rural_hospital",
    "check_stable_feasibility",
    "connected_set",
    "constraint_label",
    "decompose",
    "deferred_acceptance",
    "dominance_compare",
    "enumerate_stable_bruteforce",
    "enumerate_stable_via_rotations",
    "find_cycles",
    "firm_strictly_prefers",
    "firm_weakly_prefers",
    "gen_random_market",
    "incidence_vector",
    "is_extreme_point",
    "is_individually_rational",
    "is_stable",
    "matching_firm_order",
    "matching_from_matrix",
    "parse_fractional",
    "parse_market",
    "parse_rational",
    "peel",
    "point_in_hull",
    "reduce_profile",
    "sample_hull",
    "serialize_fractional",
    "serialize_market",
    "strong_stability_check",
    "support_matching",
    "vertex_walk",
    "verify_characterization",
]
