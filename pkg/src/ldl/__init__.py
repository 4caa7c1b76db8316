"""Limited-detection-local correlations: vertices, LP membership, explicit inequality, quantum points."""

__version__ = "0.1.0"

from .errors import (
    DegenerateTau,
    InconsistentEfficiencies,
    LdlError,
    NoFeasibleSample,
    ScenarioMismatch,
    SignallingInput,
    SizeOverflow,
    ZeroEfficiency,
    ZeroEtaMin,
)
from .geometry import (
    Certificate,
    Member,
    MembershipProblem,
    NonMember,
    certificate_check,
    check_membership,
    critical_eta_min,
    sample_feasible_points,
)
from .inequality import LdlIneqResult, eq5_region, eval_eq5
from .model import (
    DetectionBounds,
    FullCorrelation,
    ObservedEfficiencies,
    PostselectedCorrelation,
    Scenario,
    postselect,
    rationalize,
    validate,
)
from .quantum import (
    ProjectiveSetting,
    TwoQubitState,
    born_correlation,
    hardy_point,
    mix_with_white_noise,
)
from .schemes import MdlParams, SchemeParams, apply_scheme, assignment_sweep, ldl_to_mdl, mdl_nonlocality_condition
from .vertices import (
    ProductVertex,
    SinglePartyVertex,
    enumerate_ldl_vertices,
    enumerate_party_vertices,
    vertex_to_full,
)

__all__ = [
    "Certificate",
    "DegenerateTau",
    "DetectionBounds",
    "FullCorrelation",
    "InconsistentEfficiencies",
    "LdlError",
    "LdlIneqResult",
    "MdlParams",
    "Member",
    "MembershipProblem",
    "NoFeasibleSample",
    "NonMember",
    "ObservedEfficiencies",
    "PostselectedCorrelation",
    "ProductVertex",
    "ProjectiveSetting",
    "Scenario",
    "ScenarioMismatch",
    "SchemeParams",
    "SignallingInput",
    "SinglePartyVertex",
    "SizeOverflow",
    "TwoQubitState",
    "ZeroEfficiency",
    "ZeroEtaMin",
    "apply_scheme",
    "assignment_sweep",
    "born_correlation",
    "certificate_check",
    "check_membership",
    "critical_eta_min",
    "enumerate_ldl_vertices",
    "enumerate_party_vertices",
    "eq5_region",
    "eval_eq5",
    "hardy_point",
    "ldl_to_mdl",
    "mdl_nonlocality_condition",
    "mix_with_white_noise",
    "postselect",
    "rationalize",
    "sample_feasible_points",
    "validate",
    "vertex_to_full",
]
