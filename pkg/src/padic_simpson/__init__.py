"""Finite-precision p-adic Simpson correspondence for small representations of Z_p^d."""

from .cohomology import (ChainComplex, ChainMap, CohomologyReport, DegreeReport, character_blocks,
                         cohomology, comparison_higgs, comparison_map, higgs_complex, koszul_complex,
                         lift_rep)
from .correspondence import (CocycleBasis, DescentConfig, DescentResult, HiggsField,
                             cocycle_from_hom_and_gauge, descend_cocycle, higgs_to_rep, rep_to_higgs,
                             specialize_at_one, transfer_morphism)
from .errors import (ContextMismatch, ConvergenceViolation, DescentStalled, HiggsConditionViolated,
                     MalformedJob, NotAMorphism, NotAUnit, NotCommuting, NotSmall, PadicSimpsonError,
                     PrecisionExhausted, SearchSpaceTooLarge, SupportOverflow, UnsupportedRing)
from .hitchin import HitchinPoint, betti_hitchin, hitchin_map, hitchin_product, point_from_roots
from .matfun import Mat, commutator, level_of, log_quotient, mat, mat_exp, mat_log
from .rings import (LaurentRing, PrecisionContext, RingElement, Scalar, ScalarRing, galois_act,
                    laurent_mul, scalar_arith, valuation)
from .smallrep import (DeltaElement, SmallRep, TwistedCocycle, coboundary, evaluate, find_conjugator,
                       rep_equivalent, trivial_rep, twisted_cocycle_check, validate_rep)

__version__ = "0.1.0"

__all__ = [
    "ChainComplex", "ChainMap", "CocycleBasis", "CohomologyReport", "ContextMismatch",
    "ConvergenceViolation", "DegreeReport", "DeltaElement", "DescentConfig", "DescentResult",
    "DescentStalled", "HiggsConditionViolated", "HiggsField", "HitchinPoint", "LaurentRing",
    "MalformedJob", "Mat", "NotAMorphism", "NotAUnit", "NotCommuting", "NotSmall",
    "PadicSimpsonError", "PrecisionContext", "PrecisionExhausted", "RingElement", "Scalar",
    "ScalarRing", "SearchSpaceTooLarge", "SmallRep", "SupportOverflow", "TwistedCocycle",
    "UnsupportedRing", "betti_hitchin", "character_blocks", "coboundary",
    "cocycle_from_hom_and_gauge", "cohomology", "commutator", "comparison_higgs", "comparison_map",
    "descend_cocycle", "evaluate", "find_conjugator", "galois_act", "higgs_complex", "higgs_to_rep",
    "hitchin_map", "hitchin_product", "koszul_complex", "laurent_mul", "level_of", "lift_rep",
    "log_quotient", "mat", "mat_exp", "mat_log", "point_from_roots", "rep_equivalent",
    "rep_to_higgs", "scalar_arith", "specialize_at_one", "transfer_morphism", "trivial_rep",
    "twisted_cocycle_check", "validate_rep", "valuation",
]
