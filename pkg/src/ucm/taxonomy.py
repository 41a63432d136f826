"""Uncertainty taxonomy made executable.

A query result splits into three components: mass on ontological states
(the model admits it may be missing hypotheses), mass on epistemic
states (indecision between existing hypotheses), and the Shannon
entropy of what remains (irreducible randomness under the model).  The
components drive a fixed catalog of mitigation recommendations; the
catalog strings are deliberately frozen so reports stay diff-stable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import fsum, log2

import numpy as np

from ucm.inference import Factor, Marginal, cpt_factor, guard_states, joint_size
from ucm.errors import GuardExceededError
from ucm.model import ModelDocument, UncertaintyTag, VariableNode


@dataclass(frozen=True)
class UncertaintyDecomposition:
    ontological_mass: float
    epistemic_mass: float
    aleatory_entropy_bits: float


class Mean(enum.Enum):
    """Mitigation categories, in report order."""

    PREVENTION = "prevention"
    REMOVAL_DEVELOPMENT = "removal_development"
    REMOVAL_USE = "removal_use"
    TOLERANCE = "tolerance"
    FORECASTING = "forecasting"


MEANS_CATALOG: dict[Mean, str] = {
    Mean.PREVENTION: "restriction of the operational design domain (ODD)",
    Mean.REMOVAL_DEVELOPMENT: "safety analysis including epistemic/ontological uncertainty",
    Mean.REMOVAL_USE: "field observation to monitor ontological events",
    Mean.TOLERANCE: (
        "redundant architectures (e.g. overlapping field of views of sensors); "
        "components that can detect uncertainty"
    ),
    Mean.FORECASTING: "estimating the present level and future occurrence of uncertainties",
}

DEFAULT_THRESHOLDS = (0.05, 0.01)  # (epistemic, ontological)


@dataclass(frozen=True)
class MeansRecommendation:
    mean: Mean
    trigger: str
    message: str


def decompose_marginal(marg: Marginal, node: VariableNode) -> UncertaintyDecomposition:
    """Split a marginal into ontological mass, epistemic mass, and the
    entropy of the renormalized aleatory remainder."""
    if marg.variable != node.name or marg.states != node.states:
        raise ValueError(f"marginal is not over variable {node.name}")
    by_tag = {tag: [] for tag in UncertaintyTag}
    for state, p in zip(node.states, marg.probs):
        by_tag[node.tag(state)].append(p)
    remainder = by_tag[UncertaintyTag.ALEATORY]
    return UncertaintyDecomposition(
        ontological_mass=fsum(by_tag[UncertaintyTag.ONTOLOGICAL]),
        epistemic_mass=fsum(by_tag[UncertaintyTag.EPISTEMIC]),
        aleatory_entropy_bits=_entropy_bits(remainder),
    )


def _entropy_bits(weights) -> float:
    total = fsum(weights)
    if total <= 0.0:
        return 0.0
    return -fsum(q * log2(q) for w in weights if (q := w / total) > 0.0)


def joint_distribution(doc: ModelDocument, keep: tuple[str, ...], guard: int | None = None) -> np.ndarray:
    """Exact joint P(keep) as an array indexed by the kept variables'
    state indices; computed by full enumeration under the size guard."""
    size = joint_size(doc)
    limit = guard_states(guard)
    if size > limit:
        raise GuardExceededError(f"joint has {size} states; guard is {limit}")
    joint = Factor((), np.array(1.0))
    for v in doc.variables:
        joint = joint.multiply(cpt_factor(doc, v.name))
    for name in keep:
        doc.variable(name)  # raises UnknownNameError on bad names
    axes = tuple(i for i, name in enumerate(joint.scope) if name not in keep)
    summed = joint.table.sum(axis=axes)
    remaining = tuple(name for name in joint.scope if name in keep)
    order = [remaining.index(name) for name in keep]
    return np.transpose(summed, order)


def conditional_entropy(doc: ModelDocument, x: str, y: str, guard: int | None = None) -> float:
    """H(X | Y) in bits from the exact joint of the two variables."""
    if x == y:
        return 0.0
    joint = joint_distribution(doc, (x, y), guard=guard)
    h = 0.0
    for column in joint.T:
        p_y = fsum(float(v) for v in column)
        if p_y > 0.0:
            h += p_y * _entropy_bits([float(v) for v in column])
    return h


def recommend_means(
    d: UncertaintyDecomposition,
    thresholds: tuple[float, float] = DEFAULT_THRESHOLDS,
) -> tuple[MeansRecommendation, ...]:
    """Deterministic rule firing over a decomposition.

    Ontological mass above its threshold calls for field monitoring and
    domain restriction; epistemic mass above its threshold calls for
    uncertainty-aware analysis and tolerant architectures; forecasting
    always fires, echoing the residual decomposition.
    """
    tau_e, tau_o = thresholds
    fired: list[MeansRecommendation] = []
    if d.ontological_mass > tau_o:
        fired.append(_rec(Mean.PREVENTION, "ontological_mass"))
        fired.append(_rec(Mean.REMOVAL_USE, "ontological_mass"))
    if d.epistemic_mass > tau_e:
        fired.append(_rec(Mean.REMOVAL_DEVELOPMENT, "epistemic_mass"))
        fired.append(_rec(Mean.TOLERANCE, "epistemic_mass"))
    residual = (
        f"residual (ontological {d.ontological_mass:.6f}, "
        f"epistemic {d.epistemic_mass:.6f}, "
        f"aleatory {d.aleatory_entropy_bits:.6f} bits)"
    )
    fired.append(_rec(Mean.FORECASTING, residual))
    order = list(Mean)
    return tuple(sorted(fired, key=lambda r: order.index(r.mean)))


def _rec(mean: Mean, trigger: str) -> MeansRecommendation:
    return MeansRecommendation(mean=mean, trigger=trigger, message=MEANS_CATALOG[mean])
