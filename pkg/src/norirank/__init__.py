"""norirank: rank and dimension invariants of matrix groups over finite
fields, computed by two independent routes, with machine-checkable fullness
certificates.

Route A classifies composition factors of the enumerated group and sums
their contributions; Route B closes the logarithms of order-ell elements
under brackets, quotients out the Killing radical, and reads dimension and
rank off the Lie algebra.  The certificates compare either profile against a
declared ambient group.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    CapExceededError,
    CharTooSmallError,
    CrossCheckError,
    DegreeError,
    DomainTooLargeError,
    MissingAmbientError,
    NonCompactError,
    NoriRankError,
    NotIntegralError,
    NotNilpotentError,
    NotPrimeError,
    NotUnipotentError,
    OrderOverflowError,
    SchemaError,
    SingularError,
    SingularReductionError,
    UnknownFactorError,
    UnsupportedFamilyError,
)
from .gf import Field, Mat, make_field, mat_order, weil_restrict  # noqa: F401
from .grp import (  # noqa: F401
    EnumeratedGroup,
    GroupInstance,
    composition_series,
    enumerate_group,
    group_order,
    plus_subgroup,
)
from .liealg import (  # noqa: F401
    LieAlgebra,
    NoriEnvelope,
    bracket_closure,
    killing_radical_quotient,
    lie_rank,
    nil_exp,
    nil_log,
    nori_envelope,
)
from .lietypes import (  # noqa: F401
    AmbientSpec,
    CompositionFactor,
    LieTypeTag,
    RankProfile,
    chevalley_order,
    classify_factor,
    rank_profile,
    type_dim,
    type_rank,
)
from .certify import (  # noqa: F401
    AnalyzeOptions,
    Certificate,
    RationalMat,
    Report,
    analyze,
    ambient_invariants,
    certify_fullness_per_type,
    certify_fullness_type_a,
    check_dim_criterion,
    check_rank_bound,
    reduce_mod_ell,
    stabilize_lattice,
)
