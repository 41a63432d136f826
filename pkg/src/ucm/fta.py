"""Classical and evidential fault-tree analysis.

Cut sets come from top-down expansion with absorption; probabilities
from exact enumeration over the basic events in the cone of the top
gate (bounded, desk-scale guards; no BDDs).  The gate grammar has no
NOT, so every structure function is coherent (monotone), which both
guarantees cut-set semantics and lets the evidential propagation decide
"every/some completion fails" from the two extreme completions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import fsum, prod

import numpy as np

from ucm.errors import AnalysisError, GuardExceededError, UnknownNameError
from ucm.model import (
    Cpt,
    FaultTreeEvent,
    FaultTreeGate,
    GateOp,
    ModelDocument,
    VariableNode,
)

MAX_POINT_EVENTS = 20  # 2^20 assignments
MAX_EVIDENTIAL_EVENTS = 10  # 3^10 focal combinations


@dataclass(frozen=True)
class CutSetCollection:
    top: str
    cutsets: tuple[frozenset[str], ...]

    def __iter__(self):
        return iter(self.cutsets)

    def single_point_faults(self) -> tuple[str, ...]:
        return tuple(sorted(next(iter(cs)) for cs in self.cutsets if len(cs) == 1))


@dataclass(frozen=True)
class TopEventResult:
    probability: float | None
    rare_event_bound: float | None
    bel_pl: tuple[float, float] | None = None


def _cone(doc: ModelDocument, top: str):
    """Events and gates reachable from ``top``: events sorted by name,
    gates in topological order (inputs first)."""
    top_gate = doc.gate(top)  # raises UnknownNameError
    gates: dict[str, FaultTreeGate] = {}
    events: dict[str, FaultTreeEvent] = {}
    in_progress: set[str] = set()

    def visit(name: str):
        if name in gates or name in events:
            return
        node = doc.ft_node(name)
        if isinstance(node, FaultTreeEvent):
            events[name] = node
            return
        if name in in_progress:
            raise AnalysisError(f"gate graph has a cycle through '{name}'")
        in_progress.add(name)
        for child in node.inputs:
            visit(child)
        in_progress.discard(name)
        gates[name] = node

    visit(top_gate.name)
    return (
        [events[n] for n in sorted(events)],
        list(gates.values()),
    )


def _gate_fails(gate: FaultTreeGate, child_fails) -> bool:
    n = sum(child_fails)
    if gate.op is GateOp.AND:
        return n == len(gate.inputs)
    if gate.op is GateOp.OR:
        return n >= 1
    return n >= (gate.k or 0)


def structure_fails(doc: ModelDocument, top: str, failing: frozenset[str]) -> bool:
    """Evaluate the Boolean structure function for one assignment."""
    _, gates = _cone(doc, top)
    return _structure_fails(gates, top, failing)


def _structure_fails(gates_topo, top: str, failing) -> bool:
    state: dict[str, bool] = {}
    for g in gates_topo:
        child = [state[i] if i in state else (i in failing) for i in g.inputs]
        state[g.name] = _gate_fails(g, child)
    return state[top]


def _absorb(cutsets) -> set[frozenset[str]]:
    """Drop every set that is a superset of another (absorption law)."""
    minimal: set[frozenset[str]] = set()
    for cs in sorted(cutsets, key=len):
        if not any(kept <= cs for kept in minimal):
            minimal.add(cs)
    return minimal


def minimal_cut_sets(doc: ModelDocument, top: str) -> CutSetCollection:
    """Top-down expansion of the gate structure into its minimal cut
    sets, with absorption at every combination step."""
    _, gates_topo = _cone(doc, top)
    gate_names = {g.name for g in gates_topo}
    expanded: dict[str, set[frozenset[str]]] = {}

    def sets_of(name: str) -> set[frozenset[str]]:
        if name not in gate_names:
            return {frozenset((name,))}
        return expanded[name]

    for g in gates_topo:
        children = [sets_of(i) for i in g.inputs]
        if g.op is GateOp.OR:
            combined = set().union(*children) if children else set()
        elif g.op is GateOp.AND:
            combined = _and_sets(children)
        else:
            k = g.k or 0
            combined = set()
            for chosen in itertools.combinations(range(len(children)), k):
                combined |= _and_sets([children[i] for i in chosen])
        expanded[g.name] = _absorb(combined)

    ordered = sorted(expanded[top], key=lambda cs: (len(cs), tuple(sorted(cs))))
    return CutSetCollection(top=top, cutsets=tuple(ordered))


def _and_sets(children: list[set[frozenset[str]]]) -> set[frozenset[str]]:
    out = {frozenset()}
    for sets in children:
        out = {a | b for a in out for b in sets}
        out = _absorb(out)
    return out


def _point_probabilities(events) -> dict[str, float]:
    probs = {}
    for e in events:
        if e.probability is None:
            raise AnalysisError(f"event {e.name} has no point probability")
        probs[e.name] = e.probability
    return probs


def top_event_probability(doc: ModelDocument, top: str) -> TopEventResult:
    """Exact top-event probability by enumeration over the basic events
    in the cone (guarded), plus the rare-event upper bound from the
    minimal cut sets."""
    events, gates_topo = _cone(doc, top)
    if len(events) > MAX_POINT_EVENTS:
        raise GuardExceededError(
            f"{len(events)} basic events; point enumeration guard is {MAX_POINT_EVENTS}"
        )
    probs = _point_probabilities(events)

    names = [e.name for e in events]
    size = 1 << len(names)
    assignments = np.arange(size)
    fails: dict[str, np.ndarray] = {
        name: (assignments >> i & 1).astype(bool) for i, name in enumerate(names)
    }
    weights = np.ones(size)
    for name in names:
        weights = weights * np.where(fails[name], probs[name], 1.0 - probs[name])
    for g in gates_topo:
        stacked = np.stack([fails[i] for i in g.inputs])
        count = stacked.sum(axis=0)
        if g.op is GateOp.AND:
            fails[g.name] = count == len(g.inputs)
        elif g.op is GateOp.OR:
            fails[g.name] = count >= 1
        else:
            fails[g.name] = count >= (g.k or 0)
    probability = float(weights[fails[top]].sum())

    cutsets = minimal_cut_sets(doc, top)
    bound = fsum(prod(probs[name] for name in cs) for cs in cutsets.cutsets)
    return TopEventResult(probability=probability, rare_event_bound=bound)


def evidential_top_event(doc: ModelDocument, top: str) -> TopEventResult:
    """Belief/plausibility bounds on top-event failure.

    Every joint combination of per-event focal sets contributes its mass
    to Bel(top fails) when even the fewest-failures completion fails,
    and to Pl(top fails) when the most-failures completion fails.  Point
    probabilities lift to Bayesian masses, making the bounds collapse to
    the exact probability.
    """
    events, gates_topo = _cone(doc, top)
    if len(events) > MAX_EVIDENTIAL_EVENTS:
        raise GuardExceededError(
            f"{len(events)} basic events; evidential enumeration guard is {MAX_EVIDENTIAL_EVENTS}"
        )
    focal_choices = []
    for e in events:
        if e.mass is not None:
            frame = e.mass.frame
            choices = [
                (frozenset(frame.names(focal)), value)
                for focal, value in sorted(e.mass.masses.items())
                if value != 0.0
            ]
        else:
            p = e.probability
            if p is None:
                raise AnalysisError(f"event {e.name} has neither probability nor mass")
            choices = []
            if p != 0.0:
                choices.append((frozenset(("fail",)), p))
            if p != 1.0:
                choices.append((frozenset(("ok",)), 1.0 - p))
        focal_choices.append((e.name, choices))

    bel_terms: list[float] = []
    pl_terms: list[float] = []
    for combo in itertools.product(*(choices for _, choices in focal_choices)):
        mass = prod(value for _, value in combo)
        min_fail = frozenset(
            name
            for (name, _), (focal, _) in zip(focal_choices, combo)
            if focal == frozenset(("fail",))
        )
        max_fail = frozenset(
            name
            for (name, _), (focal, _) in zip(focal_choices, combo)
            if "fail" in focal
        )
        if _structure_fails(gates_topo, top, min_fail):
            bel_terms.append(mass)
        if _structure_fails(gates_topo, top, max_fail):
            pl_terms.append(mass)

    point = None
    bound = None
    if all(e.probability is not None for e in events):
        exact = top_event_probability(doc, top)
        point, bound = exact.probability, exact.rare_event_bound
    return TopEventResult(
        probability=point,
        rare_event_bound=bound,
        bel_pl=(fsum(bel_terms), fsum(pl_terms)),
    )


def ft_to_bn(doc: ModelDocument, top: str) -> ModelDocument:
    """Translate the cone of ``top`` into an equivalent Bayesian network.

    Basic events become root variables over (ok, fail) with their point
    probability as the fail prior; gates become deterministically wired
    child variables.  ``P(top = fail)`` under inference equals the exact
    top-event probability.
    """
    events, gates_topo = _cone(doc, top)
    if len(events) > MAX_POINT_EVENTS:
        raise GuardExceededError(
            f"{len(events)} basic events; translation guard is {MAX_POINT_EVENTS}"
        )
    probs = _point_probabilities(events)

    variables: list[VariableNode] = []
    cpts: list[Cpt] = []
    for e in events:
        variables.append(VariableNode(name=e.name, states=("ok", "fail")))
        p = probs[e.name]
        cpts.append(Cpt(variable=e.name, rows={(): (1.0 - p, p)}))
    for g in gates_topo:
        # a duplicated gate input collapses to one BN parent, but the
        # truth function still sees the original multiset (for k-of-n a
        # duplicate genuinely counts twice)
        parents = tuple(dict.fromkeys(g.inputs))
        variables.append(
            VariableNode(name=g.name, states=("ok", "fail"), parents=parents)
        )
        rows = {}
        for combo in itertools.product(("ok", "fail"), repeat=len(parents)):
            assignment = dict(zip(parents, combo))
            fail = _gate_fails(g, [assignment[i] == "fail" for i in g.inputs])
            rows[combo] = (0.0, 1.0) if fail else (1.0, 0.0)
        cpts.append(Cpt(variable=g.name, rows=rows))
    return ModelDocument(
        name=f"{doc.name}-{top}-bn",
        variables=tuple(variables),
        cpts=tuple(cpts),
    )
