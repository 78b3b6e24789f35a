"""crnbound: structural analysis, mass-action simulation, and boundedness
certification for chemical reaction networks."""

from ._kernels import kernel_backend
from .certificates import (
    CombinationCert,
    ConservationRelation,
    OrthogonalCert,
    SignPattern,
    respecting_relation,
    stiemke,
    stiemke_signed,
)
from .dynamics import (
    IntegrateOptions,
    Trajectory,
    descent,
    descent_worst_case,
    integrate,
    lyapunov,
    lyapunov_gradient,
    rate,
    rhs,
)
from .graph import (
    LinkageDecomposition,
    is_reversible,
    is_union_of_linkage_classes,
    is_weakly_reversible,
    linkage_classes,
    reaction_diagram,
)
from .kinetics import BandedRate, ConstantRate, Kinetics, Sinusoid, Switching
from .model import (
    Complex,
    Reaction,
    ReactionNetwork,
    Species,
    StoichiometricBasis,
    conservation_basis,
    monomial,
    project,
    reaction_vectors,
    stoichiometric_basis,
    validate_network,
)
from .parser import NetworkDocument, ParseError, lower, parse, parse_file, render
from .tiers import (
    PointSequence,
    TierPartition,
    partially_monotonic_subsequence,
    partition_subsequence,
    theorem_conservation_check,
    tier_partition,
)

__version__ = "0.1.0"
