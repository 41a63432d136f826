"""Domain types for uncertainty-aware system models.

A model document couples a discrete Bayesian network (variables with
conditional probability tables and per-state uncertainty tags) with a
classical fault tree (basic events and Boolean gates).  Documents are
immutable after construction; validation lives in :mod:`ucm.validation`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from ucm.evidence import MassFunction

MAX_STATES = 16
ROW_SUM_TOL = 1e-9


class UncertaintyTag(enum.Enum):
    """Classification of what a state's probability mass represents."""

    ALEATORY = "aleatory"
    EPISTEMIC = "epistemic"
    ONTOLOGICAL = "ontological"


class GateOp(enum.Enum):
    AND = "and"
    OR = "or"
    KOFN = "kofn"


@dataclass(frozen=True)
class VariableNode:
    """A discrete random variable of the Bayesian network.

    ``tags`` holds only explicit tags; untagged states default to
    aleatory.  ``disjunctions`` maps a state that stands for "one of
    several atomic states" (epistemic indecision) to the atomic states
    it covers.
    """

    name: str
    states: tuple[str, ...]
    parents: tuple[str, ...] = ()
    tags: dict[str, UncertaintyTag] = field(default_factory=dict)
    disjunctions: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def tag(self, state: str) -> UncertaintyTag:
        return self.tags.get(state, UncertaintyTag.ALEATORY)

    @property
    def atomic_states(self) -> tuple[str, ...]:
        """States that name an actual hypothesis of the model: neither a
        disjunction placeholder nor an ontological ignorance state."""
        return tuple(
            s
            for s in self.states
            if s not in self.disjunctions and self.tag(s) is not UncertaintyTag.ONTOLOGICAL
        )

    def state_index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            from ucm.errors import UnknownNameError

            raise UnknownNameError(f"variable {self.name} has no state '{state}'") from None


@dataclass(frozen=True)
class Cpt:
    """Conditional probability table of one variable.

    Rows are keyed by the parent-state combination (a tuple following the
    variable's parent declaration order; the empty tuple for roots) and
    hold one probability per state of the variable.
    """

    variable: str
    rows: dict[tuple[str, ...], tuple[float, ...]]


@dataclass(frozen=True)
class FaultTreeEvent:
    """A basic event, quantified by a point probability or by a mass
    function over the frame (fail, ok)."""

    name: str
    probability: float | None = None
    mass: MassFunction | None = None


@dataclass(frozen=True)
class FaultTreeGate:
    name: str
    op: GateOp
    inputs: tuple[str, ...]
    k: int | None = None  # only for KOFN


@dataclass(frozen=True)
class ModelDocument:
    name: str
    variables: tuple[VariableNode, ...] = ()
    cpts: tuple[Cpt, ...] = ()
    events: tuple[FaultTreeEvent, ...] = ()
    gates: tuple[FaultTreeGate, ...] = ()

    def variable(self, name: str) -> VariableNode:
        for v in self.variables:
            if v.name == name:
                return v
        from ucm.errors import UnknownNameError

        raise UnknownNameError(f"no variable '{name}'")

    def cpt(self, variable: str) -> Cpt:
        for c in self.cpts:
            if c.variable == variable:
                return c
        from ucm.errors import UnknownNameError

        raise UnknownNameError(f"no CPT for variable '{variable}'")

    def event(self, name: str) -> FaultTreeEvent:
        for e in self.events:
            if e.name == name:
                return e
        from ucm.errors import UnknownNameError

        raise UnknownNameError(f"no event '{name}'")

    def gate(self, name: str) -> FaultTreeGate:
        for g in self.gates:
            if g.name == name:
                return g
        from ucm.errors import UnknownNameError

        raise UnknownNameError(f"no gate '{name}'")

    def ft_node(self, name: str) -> FaultTreeEvent | FaultTreeGate:
        """Resolve a fault-tree name to its event or gate."""
        for e in self.events:
            if e.name == name:
                return e
        for g in self.gates:
            if g.name == name:
                return g
        from ucm.errors import UnknownNameError

        raise UnknownNameError(f"no event or gate '{name}'")
