"""Semantic validation of parsed model documents.

Every type invariant is enforced here, as an error finding; nothing is
auto-repaired.  In particular CPT rows that do not sum to one are
rejected rather than renormalized, because a silent repair would mask
elicitation mistakes.  Findings are deterministically ordered by
(owning variable/gate name, row index).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import fsum

from ucm.evidence import MASS_SUM_TOL
from ucm.model import (
    MAX_STATES,
    ROW_SUM_TOL,
    Cpt,
    FaultTreeGate,
    GateOp,
    ModelDocument,
    UncertaintyTag,
    VariableNode,
)

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Finding:
    severity: str
    location: str
    message: str
    sort_key: tuple = field(default=(), compare=False)

    def __str__(self):
        return f"{self.severity}\t{self.location}\t{self.message}"


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == ERROR)

    @property
    def ok(self) -> bool:
        return not self.errors

    def __iter__(self):
        return iter(self.findings)


class _Collector:
    def __init__(self):
        self.findings: list[Finding] = []

    def add(self, severity, owner, row, location, message):
        self.findings.append(
            Finding(severity, location, message, sort_key=(owner, row, location, message))
        )

    def error(self, owner, row, location, message):
        self.add(ERROR, owner, row, location, message)

    def warning(self, owner, row, location, message):
        self.add(WARNING, owner, row, location, message)


def validate(doc: ModelDocument) -> ValidationReport:
    """Check every document invariant; returns an ordered report whose
    error findings are empty iff the document is semantically valid."""
    out = _Collector()

    if not doc.variables and not doc.events and not doc.gates:
        out.error("", -1, "model", "document has neither Bayesian-network variables nor fault-tree nodes")

    var_by_name: dict[str, VariableNode] = {}
    for v in doc.variables:
        if v.name in var_by_name:
            out.error(v.name, -1, f"variable {v.name}", "duplicate variable name")
        else:
            var_by_name[v.name] = v

    for v in doc.variables:
        _check_variable(v, var_by_name, out)

    _check_cycles(
        {v.name: [p for p in v.parents if p in var_by_name] for v in doc.variables},
        out,
    )

    _check_cpts(doc, var_by_name, out)
    _check_fault_tree(doc, out)

    ordered = tuple(sorted(out.findings, key=lambda f: f.sort_key))
    return ValidationReport(ordered)


def _check_variable(v: VariableNode, var_by_name, out: _Collector):
    loc = f"variable {v.name}"
    if not 2 <= len(v.states) <= MAX_STATES:
        out.error(v.name, -1, loc, f"variable has {len(v.states)} states; allowed 2..{MAX_STATES}")
    seen = set()
    for s in v.states:
        if s in seen:
            out.error(v.name, -1, loc, f"duplicate state name '{s}'")
        seen.add(s)
    seen_parents = set()
    for p in v.parents:
        if p in seen_parents:
            out.error(v.name, -1, loc, f"duplicate parent '{p}'")
        seen_parents.add(p)
        if p not in var_by_name:
            out.error(v.name, -1, loc, f"unresolved reference: no variable '{p}'")
    for s in v.tags:
        if s not in v.states:
            out.error(v.name, -1, loc, f"tag references undeclared state '{s}'")
    for state, targets in v.disjunctions.items():
        if state not in v.states:
            out.error(v.name, -1, loc, f"disjunction references undeclared state '{state}'")
        elif v.tag(state) is not UncertaintyTag.EPISTEMIC:
            out.error(v.name, -1, loc, f"disjunction state '{state}' must be tagged epistemic")
        if len(targets) < 2:
            out.warning(v.name, -1, loc, f"disjunction '{state}' covers fewer than two states")
        seen_targets = set()
        for t in targets:
            if t in seen_targets:
                out.error(v.name, -1, loc, f"duplicate disjunction target '{t}'")
            seen_targets.add(t)
            if t not in v.states:
                out.error(v.name, -1, loc, f"disjunction target '{t}' is not a state of {v.name}")
                continue
            if t in v.disjunctions:
                out.error(v.name, -1, loc, f"disjunction target '{t}' is itself a disjunction state")
            if v.tag(t) is UncertaintyTag.ONTOLOGICAL:
                out.error(
                    v.name, -1, loc,
                    f"disjunction target '{t}' is tagged ontological; targets must be atomic hypotheses",
                )


def _check_cycles(adjacency: dict[str, list[str]], out: _Collector):
    """Report every strongly connected component that contains a cycle."""
    for scc in _tarjan(adjacency):
        if len(scc) > 1 or scc[0] in adjacency.get(scc[0], ()):
            names = sorted(scc)
            out.error(names[0], -1, "model", f"cycle detected: {', '.join(names)}")


def _tarjan(adjacency: dict[str, list[str]]) -> list[list[str]]:
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = itertools.count()

    def strongconnect(node):
        index[node] = low[node] = next(counter)
        stack.append(node)
        on_stack.add(node)
        for succ in adjacency.get(node, ()):
            if succ not in index:
                strongconnect(succ)
                low[node] = min(low[node], low[succ])
            elif succ in on_stack:
                low[node] = min(low[node], index[succ])
        if low[node] == index[node]:
            component = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                component.append(w)
                if w == node:
                    break
            sccs.append(component)

    for node in sorted(adjacency):
        if node not in index:
            strongconnect(node)
    return sccs


def _expected_combinations(v: VariableNode, var_by_name) -> list[tuple[str, ...]] | None:
    axes = []
    for p in v.parents:
        parent = var_by_name.get(p)
        if parent is None:
            return None
        axes.append(parent.states)
    return [tuple(c) for c in itertools.product(*axes)]


def _check_cpts(doc: ModelDocument, var_by_name, out: _Collector):
    cpt_by_var: dict[str, Cpt] = {}
    for c in doc.cpts:
        if c.variable in cpt_by_var:
            out.error(c.variable, -1, f"cpt {c.variable}", "duplicate CPT")
            continue
        cpt_by_var[c.variable] = c
        if c.variable not in var_by_name:
            out.error(c.variable, -1, f"cpt {c.variable}",
                      f"unresolved reference: no variable '{c.variable}'")

    for name, v in var_by_name.items():
        if name not in cpt_by_var:
            out.error(name, -1, f"variable {name}", f"variable {name} has no CPT")

    for c in doc.cpts:
        v = var_by_name.get(c.variable)
        if v is None:
            continue
        expected = _expected_combinations(v, var_by_name)
        row_index = {combo: i for i, combo in enumerate(expected or [])}
        next_extra = len(row_index)
        for combo, values in c.rows.items():
            idx = row_index.get(combo, next_extra)
            if combo not in row_index:
                next_extra += 1
            row_loc = f"cpt {c.variable} row ({', '.join(combo)})"
            if len(combo) != len(v.parents):
                out.error(c.variable, idx, row_loc,
                          f"row names {len(combo)} parent states; variable has {len(v.parents)} parents")
                continue
            bad_ref = False
            for parent_name, state in zip(v.parents, combo):
                parent = var_by_name.get(parent_name)
                if parent is not None and state not in parent.states:
                    out.error(c.variable, idx, row_loc,
                              f"'{state}' is not a state of parent {parent_name}")
                    bad_ref = True
            if expected is not None and not bad_ref and combo not in row_index:
                out.error(c.variable, idx, row_loc, "row does not match any parent-state combination")
            if len(values) != len(v.states):
                out.error(c.variable, idx, row_loc,
                          f"row has {len(values)} probabilities; variable has {len(v.states)} states")
                continue
            for x in values:
                if not 0.0 <= x <= 1.0:
                    out.error(c.variable, idx, row_loc, f"probability {x} outside [0, 1]")
            total = fsum(values)
            if abs(total - 1.0) > ROW_SUM_TOL:
                out.error(c.variable, idx, row_loc, f"CPT row sum {total:.6g} ≠ 1")
        if expected is not None:
            for combo in expected:
                if combo not in c.rows:
                    out.error(c.variable, row_index[combo],
                              f"cpt {c.variable} row ({', '.join(combo)})",
                              f"missing row ({', '.join(combo)})")


def _check_fault_tree(doc: ModelDocument, out: _Collector):
    event_names = set()
    for e in doc.events:
        loc = f"event {e.name}"
        if e.name in event_names:
            out.error(e.name, -1, loc, "duplicate event name")
        event_names.add(e.name)
        if e.probability is not None and e.mass is not None:
            out.error(e.name, -1, loc, "event must have exactly one of p/mass (both present)")
        elif e.probability is None and e.mass is None:
            out.error(e.name, -1, loc, "event must have exactly one of p/mass (neither present)")
        if e.probability is not None and not 0.0 <= e.probability <= 1.0:
            out.error(e.name, -1, loc, f"probability {e.probability} outside [0, 1]")
        if e.mass is not None:
            for focal, value in e.mass.masses.items():
                if not 0.0 <= value <= 1.0:
                    out.error(e.name, -1, loc, f"mass {value} outside [0, 1]")
            total = fsum(e.mass.masses.values())
            if abs(total - 1.0) > MASS_SUM_TOL:
                out.error(e.name, -1, loc, f"mass sum {total:.6g} ≠ 1")

    gate_by_name: dict[str, FaultTreeGate] = {}
    for g in doc.gates:
        loc = f"gate {g.name}"
        if g.name in gate_by_name:
            out.error(g.name, -1, loc, "duplicate gate name")
        gate_by_name[g.name] = g
        if g.name in event_names:
            out.error(g.name, -1, loc, f"name '{g.name}' declared as both event and gate")

    for g in doc.gates:
        loc = f"gate {g.name}"
        if len(g.inputs) == 0:
            out.error(g.name, -1, loc, "gate has no inputs")
        elif len(g.inputs) == 1:
            out.warning(g.name, -1, loc, "gate has a single input")
        for name in g.inputs:
            if name not in event_names and name not in gate_by_name:
                out.error(g.name, -1, loc, f"unresolved reference: no event or gate '{name}'")
        if g.op is GateOp.KOFN and not 1 <= (g.k or 0) <= len(g.inputs):
            out.error(g.name, -1, loc, f"k={g.k} outside 1..{len(g.inputs)}")

    _check_cycles(
        {
            g.name: [i for i in g.inputs if i in gate_by_name]
            for g in doc.gates
        },
        out,
    )
