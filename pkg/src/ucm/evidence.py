"""Dempster-Shafer evidence layer.

Mass functions assign belief mass to *subsets* of a frame of discernment,
which is what lets a single number express "car or pedestrian, can't tell"
without splitting it arbitrarily.  Frames are capped at 16 hypotheses so a
focal set fits in a 16-bit mask and powerset loops stay cheap.

The bridge from Bayesian-network output to this layer is
:func:`marginal_to_mass`: atomic states become singletons, declared
disjunction states become mass on their covered set, and states tagged
ontological become mass on the full frame (total ignorance, since they
stand for hypotheses the model does not contain).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import fsum
from typing import TYPE_CHECKING, Iterable

from ucm.errors import AnalysisError, UnknownNameError
from ucm.model import MAX_STATES, UncertaintyTag

if TYPE_CHECKING:
    from ucm.inference import Marginal
    from ucm.model import VariableNode

MASS_SUM_TOL = 1e-9
TOTAL_CONFLICT_TOL = 1e-12

FocalSet = int  # bit i set <=> frame.hypotheses[i] in the set


@dataclass(frozen=True)
class Frame:
    """An ordered frame of discernment (1..16 hypotheses)."""

    hypotheses: tuple[str, ...]

    def __post_init__(self):
        if not 1 <= len(self.hypotheses) <= MAX_STATES:
            raise ValueError(f"frame must have 1..{MAX_STATES} hypotheses")
        if len(set(self.hypotheses)) != len(self.hypotheses):
            raise ValueError("frame hypotheses must be unique")

    def __len__(self):
        return len(self.hypotheses)

    @property
    def full(self) -> FocalSet:
        return (1 << len(self.hypotheses)) - 1

    def mask(self, subset: Iterable[str] | FocalSet) -> FocalSet:
        """Encode a subset given as hypothesis names (or pass a mask through)."""
        if isinstance(subset, int):
            if subset & ~self.full:
                raise UnknownNameError(f"focal-set mask {subset:#x} is outside the frame")
            return subset
        mask = 0
        for name in subset:
            try:
                mask |= 1 << self.hypotheses.index(name)
            except ValueError:
                raise UnknownNameError(f"'{name}' is not a hypothesis of the frame") from None
        return mask

    def names(self, mask: FocalSet) -> tuple[str, ...]:
        return tuple(h for i, h in enumerate(self.hypotheses) if mask >> i & 1)


@dataclass(frozen=True)
class MassFunction:
    """A basic mass assignment over ``frame``.

    ``masses`` maps non-empty focal-set masks to mass.  Structural rules
    (no mass on the empty set, no negative mass) are enforced here; the
    sum-to-one rule is checked by document validation and by ``check()``
    so that parsed-but-invalid documents remain representable.
    """

    frame: Frame
    masses: dict[FocalSet, float]

    def __post_init__(self):
        for focal, value in self.masses.items():
            if focal == 0:
                raise ValueError("mass on the empty set is not allowed")
            if focal & ~self.frame.full:
                raise ValueError(f"focal set {focal:#x} is outside the frame")
            if value < 0:
                raise ValueError(f"negative mass {value}")

    def check(self) -> None:
        total = fsum(self.masses.values())
        if abs(total - 1.0) > MASS_SUM_TOL:
            raise ValueError(f"masses sum to {total}, not 1")

    def mass(self, subset: Iterable[str] | FocalSet) -> float:
        return self.masses.get(self.frame.mask(subset), 0.0)

    def bel(self, subset: Iterable[str] | FocalSet) -> float:
        """Belief: total mass of focal sets contained in ``subset``."""
        s = self.frame.mask(subset)
        return fsum(v for focal, v in self.masses.items() if focal & ~s == 0)

    def pl(self, subset: Iterable[str] | FocalSet) -> float:
        """Plausibility: total mass of focal sets intersecting ``subset``."""
        s = self.frame.mask(subset)
        return fsum(v for focal, v in self.masses.items() if focal & s)

    def is_bayesian(self) -> bool:
        return all(focal & (focal - 1) == 0 for focal in self.masses)

    @staticmethod
    def vacuous(frame: Frame) -> MassFunction:
        return MassFunction(frame, {frame.full: 1.0})

    @staticmethod
    def bayesian(frame: Frame, probs: Iterable[float]) -> MassFunction:
        probs = tuple(probs)
        if len(probs) != len(frame):
            raise ValueError("need one probability per hypothesis")
        return MassFunction(frame, {1 << i: p for i, p in enumerate(probs) if p != 0.0})


def dempster_combine(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Dempster's rule: conjunctive combination, conflict renormalized.

    Raises :class:`AnalysisError` on total conflict (K ~ 1).
    """
    if m1.frame != m2.frame:
        raise AnalysisError("cannot combine mass functions over different frames")
    # fsum over per-focal-set term lists keeps the rule exactly commutative:
    # the term multiset is the same for m1 (+) m2 and m2 (+) m1.
    terms: dict[FocalSet, list[float]] = {}
    for (a, va), (b, vb) in itertools.product(m1.masses.items(), m2.masses.items()):
        terms.setdefault(a & b, []).append(va * vb)
    conflict = fsum(terms.pop(0, ()))
    if conflict >= 1.0 - TOTAL_CONFLICT_TOL:
        raise AnalysisError("total conflict: the two mass functions share no possibility")
    scale = 1.0 - conflict
    return MassFunction(m1.frame, {focal: fsum(v) / scale for focal, v in sorted(terms.items())})


def pignistic(m: MassFunction) -> tuple[float, ...]:
    """Point probabilities: each focal set's mass split evenly over its
    elements.  Returned in frame order."""
    out = [0.0] * len(m.frame)
    for focal, value in m.masses.items():
        members = [i for i in range(len(m.frame)) if focal >> i & 1]
        share = value / len(members)
        for i in members:
            out[i] += share
    return tuple(out)


def bel_pl_intervals(m: MassFunction) -> tuple[tuple[str, float, float], ...]:
    """Per-hypothesis ``(name, Bel, Pl)`` for every singleton of the frame."""
    return tuple(
        (h, m.bel(1 << i), m.pl(1 << i)) for i, h in enumerate(m.frame.hypotheses)
    )


def marginal_to_mass(marg: Marginal, node: VariableNode) -> MassFunction:
    """Reinterpret a marginal over ``node`` as a mass function.

    The frame consists of the node's atomic states.  Probability on an
    atomic state becomes singleton mass, probability on a disjunction
    state becomes mass on its declared set, and probability on an
    ontological state becomes mass on the full frame.
    """
    if marg.variable != node.name or marg.states != node.states:
        raise AnalysisError(f"marginal is not over variable {node.name}")
    atoms = node.atomic_states
    if not atoms:
        raise AnalysisError(f"variable {node.name} has no atomic states to form a frame")
    frame = Frame(atoms)
    masses: dict[FocalSet, float] = {}
    for state, p in zip(node.states, marg.probs):
        if p == 0.0:
            continue
        if state in node.disjunctions:
            focal = frame.mask(node.disjunctions[state])
        elif node.tag(state) is UncertaintyTag.ONTOLOGICAL:
            focal = frame.full
        else:
            focal = frame.mask((state,))
        masses[focal] = masses.get(focal, 0.0) + p
    return MassFunction(frame, masses)
