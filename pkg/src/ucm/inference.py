"""Exact discrete inference on a validated Bayesian network.

Two independent routes compute the same posterior:

* :func:`posterior_marginal` — variable elimination with a min-degree
  greedy ordering (ties broken alphabetically), the production path.
* :func:`joint_enumerate` — materializes the full joint table and sums,
  used as a test oracle and hard-capped by a size guard.

Both are pure functions of ``(doc, query)`` and safe to run concurrently
over a shared document.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from math import prod

import numpy as np

from ucm.errors import ContradictoryEvidenceError, GuardExceededError, UnknownNameError
from ucm.model import ModelDocument

DEFAULT_GUARD_STATES = 1 << 24
ZERO_MASS_TOL = 1e-12
GUARD_ENV_VAR = "UCM_GUARD_STATES"


def guard_states(override: int | None = None) -> int:
    """Joint-size guard: ``override`` arg, else UCM_GUARD_STATES, else 2^24."""
    if override is not None:
        return override
    env = os.environ.get(GUARD_ENV_VAR)
    return int(env) if env else DEFAULT_GUARD_STATES


@dataclass(frozen=True)
class Query:
    target: str
    evidence: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Marginal:
    variable: str
    states: tuple[str, ...]
    probs: tuple[float, ...]

    def prob(self, state: str) -> float:
        return self.probs[self.states.index(state)]


@dataclass(frozen=True)
class Factor:
    """Dense non-negative table over an ordered variable scope.

    ``table.shape`` is the per-variable cardinality tuple; the empty
    scope denotes a scalar."""

    scope: tuple[str, ...]
    table: np.ndarray

    def aligned(self, union_scope: tuple[str, ...]) -> np.ndarray:
        """View of the table broadcastable over ``union_scope``."""
        order = [self.scope.index(v) for v in union_scope if v in self.scope]
        t = np.transpose(self.table, order)
        shape = []
        i = 0
        for v in union_scope:
            if v in self.scope:
                shape.append(t.shape[i])
                i += 1
            else:
                shape.append(1)
        return t.reshape(shape)

    def multiply(self, other: Factor) -> Factor:
        scope = self.scope + tuple(v for v in other.scope if v not in self.scope)
        return Factor(scope, self.aligned(scope) * other.aligned(scope))

    def marginalize(self, var: str) -> Factor:
        axis = self.scope.index(var)
        return Factor(
            self.scope[:axis] + self.scope[axis + 1 :],
            self.table.sum(axis=axis),
        )

    def reduce(self, var: str, state_index: int) -> Factor:
        axis = self.scope.index(var)
        return Factor(
            self.scope[:axis] + self.scope[axis + 1 :],
            np.take(self.table, state_index, axis=axis),
        )


def cpt_factor(doc: ModelDocument, variable: str) -> Factor:
    """Build the factor P(variable | parents) with scope parents+(variable,)
    from the declared CPT rows."""
    v = doc.variable(variable)
    c = doc.cpt(variable)
    cards = [len(doc.variable(p).states) for p in v.parents]
    table = np.zeros(tuple(cards) + (len(v.states),))
    parent_nodes = [doc.variable(p) for p in v.parents]
    for combo, values in c.rows.items():
        idx = tuple(p.states.index(s) for p, s in zip(parent_nodes, combo))
        table[idx] = values
    return Factor(v.parents + (variable,), table)


def _resolve_query(doc: ModelDocument, q: Query):
    target = doc.variable(q.target)
    if q.target in q.evidence:
        raise UnknownNameError(f"target {q.target} cannot also be evidence")
    evidence_idx = {}
    for name, state in q.evidence.items():
        v = doc.variable(name)
        evidence_idx[name] = v.state_index(state)
    return target, evidence_idx


def _finish(doc: ModelDocument, target, table: np.ndarray) -> Marginal:
    z = float(table.sum())
    if z < ZERO_MASS_TOL:
        raise ContradictoryEvidenceError(
            f"evidence is contradictory: joint mass {z:.3e} while querying {target.name}"
        )
    probs = table / z
    return Marginal(target.name, target.states, tuple(float(p) for p in probs))


def posterior_marginal(doc: ModelDocument, q: Query) -> Marginal:
    """Exact P(target | evidence) by variable elimination."""
    target, evidence_idx = _resolve_query(doc, q)
    factors = [cpt_factor(doc, v.name) for v in doc.variables]
    reduced = []
    for f in factors:
        for name, idx in evidence_idx.items():
            if name in f.scope:
                f = f.reduce(name, idx)
        reduced.append(f)
    factors = reduced

    to_eliminate = {
        v.name for v in doc.variables if v.name != q.target and v.name not in evidence_idx
    }
    while to_eliminate:
        var = _min_degree_pick(factors, to_eliminate)
        to_eliminate.discard(var)
        involved = [f for f in factors if var in f.scope]
        if not involved:
            continue
        product = involved[0]
        for f in involved[1:]:
            product = product.multiply(f)
        factors = [f for f in factors if var not in f.scope]
        factors.append(product.marginalize(var))

    result = Factor((), np.array(1.0))
    for f in factors:
        result = result.multiply(f)
    if result.scope != (q.target,):
        # scalar-only leftovers happen when the target never appears; not
        # reachable for validated documents, but keep the failure loud
        raise UnknownNameError(f"no factor mentions target {q.target}")
    return _finish(doc, target, result.table)


def _min_degree_pick(factors, candidates: set[str]) -> str:
    """Next variable to eliminate: fewest distinct neighbors, then name."""
    neighbors: dict[str, set[str]] = {v: set() for v in candidates}
    for f in factors:
        for v in f.scope:
            if v in neighbors:
                neighbors[v].update(s for s in f.scope if s != v)
    return min(candidates, key=lambda v: (len(neighbors[v]), v))


def joint_size(doc: ModelDocument) -> int:
    return prod(len(v.states) for v in doc.variables) if doc.variables else 0


def joint_enumerate(doc: ModelDocument, q: Query, guard: int | None = None) -> Marginal:
    """Same contract as :func:`posterior_marginal`, computed by summing
    the fully expanded joint table.  Guarded by :func:`guard_states`."""
    target, evidence_idx = _resolve_query(doc, q)
    size = joint_size(doc)
    limit = guard_states(guard)
    if size > limit:
        raise GuardExceededError(f"joint has {size} states; guard is {limit}")
    scope = tuple(v.name for v in doc.variables)
    joint = Factor((), np.array(1.0))
    for v in doc.variables:
        joint = joint.multiply(cpt_factor(doc, v.name))
    full = joint.aligned(scope) * np.ones(tuple(len(v.states) for v in doc.variables))
    for name, idx in evidence_idx.items():
        axis = scope.index(name)
        mask_shape = [1] * len(scope)
        mask_shape[axis] = full.shape[axis]
        mask = np.zeros(mask_shape)
        index = [0] * len(scope)
        index[axis] = idx
        mask[tuple(index)] = 1.0
        full = full * mask
    axes = tuple(i for i, name in enumerate(scope) if name != q.target)
    return _finish(doc, target, full.sum(axis=axes))
