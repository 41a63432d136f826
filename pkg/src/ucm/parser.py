"""Parser and serializer for the .ucm model format.

The format is a plain-text, line-oriented grammar: ``#`` starts a comment,
identifiers match ``[A-Za-z_][A-Za-z0-9_]*``, and numbers are dot-decimal
literals (no exponents, no locale handling).  Braced bodies may span
lines.  Parsing is purely structural; semantic rules live in
:mod:`ucm.validation`.

    model "perception-chain"
    variable ground_truth { states: car, pedestrian, unknown
                            tags: unknown=ontological }
    cpt ground_truth { () -> 0.6, 0.3, 0.1 }
    event A { p: 0.1 }
    event B { mass: {fail}=0.15, {ok}=0.8, {fail,ok}=0.05 }
    gate TOP = or(A, G1)
    gate G2  = kofn(2; A, B, C)
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal

from ucm.errors import ParseError
from ucm.evidence import Frame, MassFunction
from ucm.model import (
    Cpt,
    FaultTreeEvent,
    FaultTreeGate,
    GateOp,
    ModelDocument,
    UncertaintyTag,
    VariableNode,
)

EVENT_FRAME = Frame(("fail", "ok"))

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<string>"[^"\n]*")
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<arrow>->)
  | (?P<punct>[{}():,=;])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # ident | number | string | punct | eof
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "newline":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            col = m.start() - line_start + 1
            if kind == "arrow":
                kind = "punct"
            tokens.append(_Token(kind, m.group(), line, col))
        pos = m.end()
    tokens.append(_Token("eof", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.column)

    def at_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.text == text

    def expect_punct(self, text: str) -> _Token:
        if not self.at_punct(text):
            self.error(f"expected '{text}'")
        return self.advance()

    def expect_ident(self, what: str = "identifier") -> _Token:
        if self.peek().kind != "ident":
            self.error(f"expected {what}")
        return self.advance()

    def expect_number(self) -> float:
        if self.peek().kind != "number":
            self.error("expected number")
        return float(self.advance().text)

    def expect_int(self, what: str) -> int:
        tok = self.peek()
        if tok.kind != "number" or "." in tok.text:
            self.error(f"expected integer {what}")
        return int(self.advance().text)

    def ident_list(self, what: str = "identifier") -> list[str]:
        names = [self.expect_ident(what).text]
        while self.at_punct(","):
            self.advance()
            names.append(self.expect_ident(what).text)
        return names

    # -- statements ----------------------------------------------------

    def document(self) -> ModelDocument:
        tok = self.peek()
        if not (tok.kind == "ident" and tok.text == "model"):
            self.error("document must start with: model \"name\"")
        self.advance()
        name_tok = self.peek()
        if name_tok.kind != "string":
            self.error("expected quoted model name")
        self.advance()
        name = name_tok.text[1:-1]

        variables: list[VariableNode] = []
        cpts: list[Cpt] = []
        events: list[FaultTreeEvent] = []
        gates: list[FaultTreeGate] = []
        seen: dict[tuple[str, str], bool] = {}

        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind != "ident":
                self.error("expected a declaration (variable | cpt | event | gate)")
            keyword = tok.text
            if keyword == "model":
                self.error("duplicate model declaration", tok)
            if keyword not in ("variable", "cpt", "event", "gate"):
                self.error(f"unknown keyword '{keyword}'", tok)
            self.advance()
            name_tok = self.expect_ident(f"{keyword} name")
            if (keyword, name_tok.text) in seen:
                self.error(f"duplicate {keyword} '{name_tok.text}'", name_tok)
            seen[(keyword, name_tok.text)] = True
            if keyword == "variable":
                variables.append(self.variable_body(name_tok.text))
            elif keyword == "cpt":
                cpts.append(self.cpt_body(name_tok.text))
            elif keyword == "event":
                events.append(self.event_body(name_tok.text))
            else:
                gates.append(self.gate_body(name_tok.text))

        return ModelDocument(
            name=name,
            variables=tuple(variables),
            cpts=tuple(cpts),
            events=tuple(events),
            gates=tuple(gates),
        )

    def variable_body(self, name: str) -> VariableNode:
        self.expect_punct("{")
        states: list[str] | None = None
        parents: list[str] = []
        tags: dict[str, UncertaintyTag] = {}
        disjunctions: dict[str, tuple[str, ...]] = {}
        seen_entries: set[str] = set()
        while not self.at_punct("}"):
            tok = self.expect_ident("variable entry (states | parents | tags | disjunction)")
            entry = tok.text
            if entry in ("states", "parents", "tags"):
                if entry in seen_entries:
                    self.error(f"duplicate '{entry}' entry", tok)
                seen_entries.add(entry)
                self.expect_punct(":")
                if entry == "states":
                    states = self.ident_list("state name")
                elif entry == "parents":
                    parents = self.ident_list("parent name")
                else:
                    self.tag_list(tags)
            elif entry == "disjunction":
                state_tok = self.expect_ident("disjunction state")
                if state_tok.text in disjunctions:
                    self.error(f"duplicate disjunction for '{state_tok.text}'", state_tok)
                self.expect_punct("=")
                self.expect_punct("(")
                targets = self.ident_list("disjunction target")
                self.expect_punct(")")
                disjunctions[state_tok.text] = tuple(targets)
            else:
                self.error(f"unknown variable entry '{entry}'", tok)
        close = self.advance()
        if states is None:
            self.error(f"variable {name} has no 'states:' entry", close)
        return VariableNode(
            name=name,
            states=tuple(states),
            parents=tuple(parents),
            tags=tags,
            disjunctions=disjunctions,
        )

    def tag_list(self, tags: dict[str, UncertaintyTag]):
        while True:
            state_tok = self.expect_ident("state name")
            self.expect_punct("=")
            tag_tok = self.expect_ident("uncertainty tag")
            try:
                tag = UncertaintyTag(tag_tok.text)
            except ValueError:
                self.error(f"unknown uncertainty tag '{tag_tok.text}'", tag_tok)
            if state_tok.text in tags:
                self.error(f"duplicate tag for state '{state_tok.text}'", state_tok)
            tags[state_tok.text] = tag
            if not self.at_punct(","):
                return
            self.advance()

    def cpt_body(self, variable: str) -> Cpt:
        self.expect_punct("{")
        rows: dict[tuple[str, ...], tuple[float, ...]] = {}
        while not self.at_punct("}"):
            open_tok = self.expect_punct("(")
            combo: list[str] = []
            if not self.at_punct(")"):
                combo = self.ident_list("parent state")
            self.expect_punct(")")
            self.expect_punct("->")
            values = [self.expect_number()]
            while self.at_punct(","):
                self.advance()
                values.append(self.expect_number())
            key = tuple(combo)
            if key in rows:
                self.error(f"duplicate CPT row ({', '.join(key)})", open_tok)
            rows[key] = tuple(values)
        self.advance()
        return Cpt(variable=variable, rows=rows)

    def event_body(self, name: str) -> FaultTreeEvent:
        self.expect_punct("{")
        probability: float | None = None
        mass: MassFunction | None = None
        while not self.at_punct("}"):
            tok = self.expect_ident("event entry (p | mass)")
            if tok.text == "p":
                if probability is not None:
                    self.error("duplicate 'p' entry", tok)
                self.expect_punct(":")
                probability = self.expect_number()
            elif tok.text == "mass":
                if mass is not None:
                    self.error("duplicate 'mass' entry", tok)
                self.expect_punct(":")
                mass = self.mass_entries()
            else:
                self.error(f"unknown event entry '{tok.text}'", tok)
        self.advance()
        return FaultTreeEvent(name=name, probability=probability, mass=mass)

    def mass_entries(self) -> MassFunction:
        masses: dict[int, float] = {}
        while True:
            self.expect_punct("{")
            members = self.ident_list("hypothesis (fail | ok)")
            for member in members:
                if member not in EVENT_FRAME.hypotheses:
                    self.error(f"unknown hypothesis '{member}' (event frame is fail, ok)")
            close = self.expect_punct("}")
            self.expect_punct("=")
            value = self.expect_number()
            focal = EVENT_FRAME.mask(members)
            if focal in masses:
                self.error("duplicate focal set in mass entry", close)
            masses[focal] = value
            if not self.at_punct(","):
                return MassFunction(EVENT_FRAME, masses)
            self.advance()

    def gate_body(self, name: str) -> FaultTreeGate:
        self.expect_punct("=")
        op_tok = self.expect_ident("gate operator (or | and | kofn)")
        try:
            op = GateOp(op_tok.text)
        except ValueError:
            self.error(f"unknown gate operator '{op_tok.text}'", op_tok)
        self.expect_punct("(")
        k = None
        if op is GateOp.KOFN:
            k = self.expect_int("k")
            self.expect_punct(";")
        inputs: list[str] = []
        if not self.at_punct(")"):
            inputs = self.ident_list("gate input")
        self.expect_punct(")")
        return FaultTreeGate(name=name, op=op, inputs=tuple(inputs), k=k)


def parse_model(text: str) -> ModelDocument:
    """Parse a .ucm document.  Raises :class:`ParseError` with line and
    column on malformed input; performs no semantic validation."""
    return _Parser(text).document()


def format_number(x: float) -> str:
    """Render a float as a dot-decimal literal that parses back exactly."""
    if x == int(x) and abs(x) < 1e16:
        return f"{int(x)}.0"
    text = repr(x)
    if "e" in text or "E" in text:
        text = format(Decimal(text), "f")
    return text


def serialize_model(doc: ModelDocument) -> str:
    """Render a document in canonical .ucm form.

    Canonical means: one entry per line, tags and disjunctions in state
    declaration order, CPT rows in row-major parent order.  The output
    parses back to an equal document.
    """
    out = [f'model "{doc.name}"']
    var_by_name = {v.name: v for v in doc.variables}
    for v in doc.variables:
        out.append(f"variable {v.name} {{")
        out.append(f"  states: {', '.join(v.states)}")
        if v.parents:
            out.append(f"  parents: {', '.join(v.parents)}")
        tagged = [s for s in v.states if s in v.tags]
        tagged += [s for s in v.tags if s not in v.states]  # preserve bad refs
        if tagged:
            pairs = ", ".join(f"{s}={v.tags[s].value}" for s in tagged)
            out.append(f"  tags: {pairs}")
        for state in list(v.states) + [s for s in v.disjunctions if s not in v.states]:
            if state in v.disjunctions:
                out.append(f"  disjunction {state} = ({', '.join(v.disjunctions[state])})")
        out.append("}")
    for c in doc.cpts:
        out.append(f"cpt {c.variable} {{")
        for combo in _row_order(c, var_by_name.get(c.variable), var_by_name):
            values = ", ".join(format_number(x) for x in c.rows[combo])
            out.append(f"  ({', '.join(combo)}) -> {values}")
        out.append("}")
    for e in doc.events:
        parts = []
        if e.probability is not None:
            parts.append(f"p: {format_number(e.probability)}")
        if e.mass is not None:
            entries = ", ".join(
                f"{{{','.join(e.mass.frame.names(focal))}}}={format_number(value)}"
                for focal, value in sorted(e.mass.masses.items())
            )
            parts.append(f"mass: {entries}")
        out.append(f"event {e.name} {{ {' '.join(parts)} }}".replace("{  }", "{ }"))
    for g in doc.gates:
        args = ", ".join(g.inputs)
        if g.op is GateOp.KOFN:
            out.append(f"gate {g.name} = kofn({g.k}; {args})")
        else:
            out.append(f"gate {g.name} = {g.op.value}({args})")
    return "\n".join(out) + "\n"


def _row_order(cpt, variable, var_by_name):
    """Canonical row order: row-major over parents in declaration order,
    with any unexpected row keys appended in parsed order."""
    ordered = []
    if variable is not None:
        expected = _combinations(variable, var_by_name)
        ordered = [combo for combo in expected if combo in cpt.rows]
    tail = [combo for combo in cpt.rows if combo not in ordered]
    return ordered + tail


def _combinations(variable, var_by_name) -> list[tuple[str, ...]]:
    """All parent-state combinations in row-major order (declaration
    order of parents, declaration order of their states)."""
    import itertools

    axes = []
    for parent in variable.parents:
        p = var_by_name.get(parent)
        if p is None:
            return []
        axes.append(p.states)
    return [tuple(c) for c in itertools.product(*axes)]
