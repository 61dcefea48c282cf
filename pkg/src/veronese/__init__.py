"""Tensor-power cone metrics and summing constants for polynomial maps.

Certified two-sided brackets for tensor cross-norms (injective, projective,
symmetric projective), the induced metrics on the cone of d-th vector
powers, homogeneous polynomial norms and cone Lipschitz constants, Lipschitz
q-summing ratios and estimates in two dual modes, discrete Pietsch
domination certificates and the factorization they induce.
"""

from ._kernels import BACKEND
from .balls import BaseNorm, ball_vertices, norming_functional, vector_norm
from .bracket import Bracket, ratio_bracket
from .cone import (ConeMetricSpace, DistortionReport, bilipschitz_experiment,
                   cone_distance, sample_cone_pairs, subspace_distortion)
from .config import DEFAULTS, Settings, thread_cap
from .errors import (BudgetExhausted, DegenerateFamily, DimensionMismatch,
                     FamilyTooLarge, LipschitzExceeded, NotCauchy,
                     NotLipschitzOnS, NotOnCone, NotSymmetric,
                     NumericalFailure, PietschInfeasible, UnsupportedNorm,
                     VeroneseError)
from .norms import (NormSelector, injective_norm, projective_norm,
                    sandwich_check, sym_projective_norm, tensor_norm)
from .polynomials import (FactorizationReport, HomPoly, VOperator,
                          apply_operator, cone_lipschitz_constant, eval_poly,
                          factorization_check, poly_norm)
from .summability import (DiscreteFactorization, FunctionalSample,
                          McShaneFunction, PairFamily, PiEstimate,
                          PietschCertificate, SummingMode, all_pairs,
                          benchmark_instances, build_factorization,
                          estimate_pi_q, lip_denominator, mcshane_extend,
                          norming_poly, pair_increments, pietsch_measure,
                          poly_denominator, sample_dictionary, summing_ratio)
from .tensors import (ConeLimit, ConePoint, SymmetricDecomposition,
                      cone_sequence_limit, same_cone_point, symmetrize,
                      symmetry_defect, veronese)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BaseNorm", "ball_vertices", "norming_functional",
    "vector_norm", "Bracket", "ratio_bracket", "ConeMetricSpace",
    "DistortionReport", "bilipschitz_experiment", "cone_distance",
    "sample_cone_pairs", "subspace_distortion", "DEFAULTS", "Settings",
    "thread_cap", "BudgetExhausted", "DegenerateFamily", "DimensionMismatch",
    "FamilyTooLarge", "LipschitzExceeded", "NotCauchy", "NotLipschitzOnS",
    "NotOnCone", "NotSymmetric", "NumericalFailure", "PietschInfeasible",
    "UnsupportedNorm", "VeroneseError", "NormSelector", "injective_norm",
    "projective_norm", "sandwich_check", "sym_projective_norm", "tensor_norm",
    "FactorizationReport", "HomPoly", "VOperator", "apply_operator",
    "cone_lipschitz_constant", "eval_poly", "factorization_check",
    "poly_norm", "DiscreteFactorization", "FunctionalSample",
    "McShaneFunction", "PairFamily", "PiEstimate", "PietschCertificate",
    "SummingMode", "all_pairs", "benchmark_instances", "build_factorization",
    "estimate_pi_q", "lip_denominator", "mcshane_extend", "norming_poly",
    "pair_increments", "pietsch_measure", "poly_denominator",
    "sample_dictionary", "summing_ratio", "ConeLimit", "ConePoint",
    "SymmetricDecomposition", "cone_sequence_limit", "same_cone_point",
    "symmetrize", "symmetry_defect", "veronese",
    "__version__",
]
