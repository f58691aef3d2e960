"""Canonical heights of rational points on elliptic curves over Q.

The height is assembled as h(P) - Psi_oo(P) - Psi_f(P): the finite part is an
exact sum of rational multiples of logs of pairwise coprime integers found
without factoring the discriminant, and the archimedean part comes from the
AGM. Heights are normalized as twice those in Silverman's book.
"""

from .arch_local import (
    AgmInput,
    CorrectionLedger,
    TorsionOrbitHitO,
    TwoTorsionPoint,
    agm_lambda,
    local_height_infinity,
    psi_infinity,
    psi_infinity_oracle_series,
    reduce_to_agm_data,
)
from .arith import (
    CoprimeBasis,
    NoFractionFound,
    coprime_basis,
    gcd_power,
    simplest_fraction_in_interval,
    unique_fraction_in_interval,
)
from .height import (
    HeightBreakdown,
    TorsionCheck,
    canonical_height,
    canonical_height_limit_oracle,
    height_pairing,
    is_torsion,
    local_height_nonarch,
    naive_height,
)
from .model import (
    O,
    NonIntegralResult,
    NotOnCurve,
    Point,
    SingularCurve,
    WeierstrassModel,
    add_points,
    derive_invariants,
    double_point,
    duplicate_kummer,
    kummer_primitive,
    transform_model,
)
from .nonarch_global import FormalLogSum, PsiFiniteOptions, eval_log_sum, psi_finite
from .nonarch_local import LocalMu, PrecisionExhausted, epsilon_at, mu_at, mu_oracle

__version__ = "0.1.0"

__all__ = [
    "AgmInput",
    "CoprimeBasis",
    "CorrectionLedger",
    "FormalLogSum",
    "HeightBreakdown",
    "LocalMu",
    "NoFractionFound",
    "NonIntegralResult",
    "NotOnCurve",
    "O",
    "Point",
    "PrecisionExhausted",
    "PsiFiniteOptions",
    "SingularCurve",
    "TorsionCheck",
    "TorsionOrbitHitO",
    "TwoTorsionPoint",
    "WeierstrassModel",
    "add_points",
    "agm_lambda",
    "canonical_height",
    "canonical_height_limit_oracle",
    "coprime_basis",
    "derive_invariants",
    "double_point",
    "duplicate_kummer",
    "epsilon_at",
    "eval_log_sum",
    "gcd_power",
    "height_pairing",
    "is_torsion",
    "kummer_primitive",
    "local_height_infinity",
    "local_height_nonarch",
    "mu_at",
    "mu_oracle",
    "naive_height",
    "psi_finite",
    "psi_infinity",
    "psi_infinity_oracle_series",
    "reduce_to_agm_data",
    "simplest_fraction_in_interval",
    "transform_model",
    "unique_fraction_in_interval",
]
