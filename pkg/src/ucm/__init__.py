"""Safety analysis over uncertainty-aware system models.

Discrete Bayesian networks and fault trees in one declarative document
format (.ucm), with three kinds of uncertainty treated as first-class:
aleatory (randomness the model quantifies), epistemic (indecision
between modeled hypotheses, via disjunction states), and ontological
(hypotheses missing from the model, via ignorance states).  Queries can
be read back as belief/plausibility intervals, and reports decompose
uncertainty by type and recommend mitigation means.
"""

from ucm.errors import (
    AnalysisError,
    ContradictoryEvidenceError,
    GuardExceededError,
    ParseError,
    UcmError,
    UnknownNameError,
)
from ucm.evidence import (
    Frame,
    MassFunction,
    bel_pl_intervals,
    dempster_combine,
    marginal_to_mass,
    pignistic,
)
from ucm.fta import (
    CutSetCollection,
    TopEventResult,
    evidential_top_event,
    ft_to_bn,
    minimal_cut_sets,
    top_event_probability,
)
from ucm.inference import Factor, Marginal, Query, joint_enumerate, posterior_marginal
from ucm.model import (
    Cpt,
    FaultTreeEvent,
    FaultTreeGate,
    GateOp,
    ModelDocument,
    UncertaintyTag,
    VariableNode,
)
from ucm.parser import parse_model, serialize_model
from ucm.taxonomy import (
    Mean,
    MEANS_CATALOG,
    MeansRecommendation,
    UncertaintyDecomposition,
    conditional_entropy,
    decompose_marginal,
    recommend_means,
)
from ucm.validation import Finding, ValidationReport, validate

__version__ = "0.1.0"

__all__ = [
    "AnalysisError",
    "ContradictoryEvidenceError",
    "Cpt",
    "CutSetCollection",
    "Factor",
    "FaultTreeEvent",
    "FaultTreeGate",
    "Finding",
    "Frame",
    "GateOp",
    "GuardExceededError",
    "Marginal",
    "MassFunction",
    "Mean",
    "MEANS_CATALOG",
    "MeansRecommendation",
    "ModelDocument",
    "ParseError",
    "Query",
    "TopEventResult",
    "UcmError",
    "UncertaintyDecomposition",
    "UncertaintyTag",
    "UnknownNameError",
    "ValidationReport",
    "VariableNode",
    "bel_pl_intervals",
    "conditional_entropy",
    "decompose_marginal",
    "dempster_combine",
    "evidential_top_event",
    "ft_to_bn",
    "joint_enumerate",
    "marginal_to_mass",
    "minimal_cut_sets",
    "parse_model",
    "pignistic",
    "posterior_marginal",
    "recommend_means",
    "serialize_model",
    "top_event_probability",
    "validate",
]
