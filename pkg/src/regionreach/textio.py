"""Text formats: model files, queries, region patterns, regions and stats.

Model files hold one automaton each::

    automaton Flower;
    clock x1 max 1;
    clock y max 1;
    int gate = 0 range [0, 3];
    channel go;
    location q0 initial;
    location Goal urgent invariant y <= 1;
    edge q0 -> q0 { guard x1 == 1; reset x1; }
    edge q0 -> Goal { guard x1 == 0 && y >= 1; sync go!; do gate := gate + 1; }

``//`` starts a comment.  A clock declared without ``max`` gets the largest
constant it is compared against.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .kinematics import RegionPattern
from .model import (RELATIONS, BinOp, BoolAtom, ClockConstraint, Const, Guard, IntConstraint,
                    IntVariable, Location, LocationAtom, ModelError, Neg, Network, Position,
                    Query, TimedAutomaton, Transition, Update, Var, validate_model)
from .region import Region


class ParseError(ModelError):
    def __init__(self, message: str, pos: Optional[Position] = None):
        super().__init__(f"{pos}: {message}" if pos else message)
        self.pos = pos
        self.bare = message


class ValidationFailed(ModelError):
    def __init__(self, diagnostics):
        super().__init__("\n".join(str(d) for d in diagnostics))
        self.diagnostics = list(diagnostics)


@dataclass(frozen=True)
class ModelSource:
    path: str
    text: str

    @classmethod
    def read(cls, path: str) -> "ModelSource":
        with open(path, encoding="utf-8") as fh:
            return cls(str(path), fh.read())


# ---------------------------------------------------------------------------
# tokens

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|//[^\n]*)
  | (?P<nl>\n)
  | (?P<int>\d+)
  | (?P<sym>E<>|->|:=|&&|==|!=|<=|>=|[<>;,{}\[\]()!?+\-*=.:])
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", "sym" or "eof"
    text: str
    pos: Position


def tokenize(text: str, source: str = "") -> list:
    tokens = []
    line, col, i = 1, 1, 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", Position(line, col, source))
        kind = m.lastgroup
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind != "ws":
                tokens.append(Token(kind, m.group(), Position(line, col, source)))
            col += m.end() - m.start()
        i = m.end()
    tokens.append(Token("eof", "", Position(line, col, source)))
    return tokens


class _Parser:
    def __init__(self, text: str, source: str = ""):
        self.toks = tokenize(text, source)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        raise ParseError(f"{msg} (found {found!r})", tok.pos)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "name") and self.tok.text == text

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            tok = self.tok
            self.i += 1
            return tok
        return None

    def expect(self, text: str) -> Token:
        tok = self.accept(text)
        if tok is None:
            self.error(f"expected {text!r}")
        return tok

    def name(self, what: str = "a name") -> Token:
        if self.tok.kind != "name":
            self.error(f"expected {what}")
        tok = self.tok
        self.i += 1
        return tok

    def integer(self) -> int:
        neg = self.accept("-") is not None
        if self.tok.kind != "int":
            self.error("expected an integer")
        value = int(self.tok.text)
        self.i += 1
        return -value if neg else value

    # integer expressions --------------------------------------------------
    def expr(self):
        left = self.term()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            left = BinOp(op, left, self.term())
        return left

    def term(self):
        left = self.factor()
        while self.at("*"):
            self.i += 1
            left = BinOp("*", left, self.factor())
        return left

    def factor(self):
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            return Const(int(tok.text))
        if tok.kind == "name":
            self.i += 1
            return Var(tok.text, tok.pos)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.accept("-"):
            if self.tok.kind == "int":
                value = int(self.tok.text)
                self.i += 1
                return Const(-value)
            return Neg(self.factor())
        self.error("expected an expression")

    def relation(self) -> str:
        tok = self.tok
        if tok.kind == "sym" and tok.text in RELATIONS + ("!=",):
            self.i += 1
            return tok.text
        self.error("expected a comparison operator")


# ---------------------------------------------------------------------------
# model files

@dataclass
class _RawAtom:
    left: object
    relation: str
    right: object
    pos: Position


_FLIP = {"<": ">", "<=": ">=", "==": "==", ">=": "<=", ">": "<", "!=": "!="}


class _ModelParser(_Parser):
    def parse(self) -> TimedAutomaton:
        start = self.expect("automaton")
        name = self.name("an automaton name").text
        self.expect(";")
        clocks, variables, channels, locations, edges = [], [], [], [], []
        while self.tok.kind != "eof":
            if self.accept("clock"):
                while True:
                    tok = self.name("a clock name")
                    cmax = self.integer() if self.accept("max") else None
                    clocks.append((tok.text, cmax, tok.pos))
                    if not self.accept(","):
                        break
                self.expect(";")
            elif self.accept("int"):
                tok = self.name("a variable name")
                self.expect("=")
                init = self.integer()
                self.expect("range")
                self.expect("[")
                lo = self.integer()
                self.expect(",")
                hi = self.integer()
                self.expect("]")
                self.expect(";")
                variables.append(IntVariable(tok.text, init, lo, hi, tok.pos))
            elif self.accept("channel"):
                while True:
                    channels.append(self.name("a channel name").text)
                    if not self.accept(","):
                        break
                self.expect(";")
            elif self.at("location"):
                locations.append(self.location())
            elif self.at("edge"):
                edges.append(self.edge())
            else:
                self.error("expected a declaration")
        return _build(name, start.pos, clocks, variables, channels, locations, edges)

    def guard(self) -> list:
        if self.accept("true"):
            return []
        atoms = [self.atom()]
        while self.accept("&&"):
            atoms.append(self.atom())
        return atoms

    def atom(self) -> _RawAtom:
        pos = self.tok.pos
        left = self.expr()
        rel = self.relation()
        right = self.expr()
        return _RawAtom(left, rel, right, pos)

    def location(self):
        self.expect("location")
        tok = self.name("a location name")
        initial = urgent = False
        inv = []
        while not self.at(";"):
            if self.accept("initial"):
                initial = True
            elif self.accept("urgent"):
                urgent = True
            elif self.accept("invariant"):
                inv = self.guard()
            else:
                self.error("expected 'initial', 'urgent', 'invariant' or ';'")
        self.expect(";")
        return tok, initial, urgent, inv

    def edge(self):
        start = self.expect("edge")
        src = self.name("a source location").text
        self.expect("->")
        dst = self.name("a target location").text
        self.expect("{")
        guard, resets, updates = [], [], []
        sync = polarity = None
        action = ""
        while not self.accept("}"):
            if self.accept("guard"):
                guard = self.guard()
            elif self.accept("sync"):
                sync = self.name("a channel name").text
                if self.accept("!"):
                    polarity = "!"
                elif self.accept("?"):
                    polarity = "?"
                else:
                    self.error("expected '!' or '?'")
            elif self.accept("reset"):
                resets.append(self.name("a clock name").text)
                while self.accept(","):
                    resets.append(self.name("a clock name").text)
            elif self.accept("do"):
                while True:
                    tok = self.name("a variable name")
                    self.expect(":=")
                    updates.append(Update(tok.text, self.expr(), tok.pos))
                    if not self.accept(","):
                        break
            elif self.accept("action"):
                action = self.name("an action label").text
            else:
                self.error("expected 'guard', 'sync', 'reset', 'do', 'action' or '}'")
            self.expect(";")
        return start.pos, src, dst, guard, sync, polarity, resets, updates, action


def _split_guard(raw: Sequence[_RawAtom], clocks: set) -> Guard:
    clock_atoms, int_atoms = [], []
    for a in raw:
        left_clocks = [v for v in a.left.variables() if v in clocks]
        right_clocks = [v for v in a.right.variables() if v in clocks]
        if not left_clocks and not right_clocks:
            int_atoms.append(IntConstraint(a.left, a.relation, a.right, a.pos))
            continue
        if isinstance(a.left, Var) and isinstance(a.right, Const) and not right_clocks:
            clock, rel, bound = a.left.name, a.relation, a.right.value
        elif isinstance(a.right, Var) and isinstance(a.left, Const) and not left_clocks:
            clock, rel, bound = a.right.name, _FLIP[a.relation], a.left.value
        else:
            raise ParseError("clock constraints must compare a clock with an integer constant",
                             a.pos)
        if rel == "!=":
            raise ParseError("'!=' is not allowed on clocks", a.pos)
        if bound < 0:
            raise ParseError("clock constants must be non-negative", a.pos)
        clock_atoms.append(ClockConstraint(clock, rel, bound, a.pos))
    return Guard(tuple(clock_atoms), tuple(int_atoms))


def _build(name, pos, clocks, variables, channels, locations, edges) -> TimedAutomaton:
    clock_names = {c for c, _, _ in clocks}
    locs = []
    for tok, initial, urgent, inv in locations:
        locs.append(Location(tok.text, initial, urgent, _split_guard(inv, clock_names), tok.pos))
    transitions = []
    for epos, src, dst, guard, sync, polarity, resets, updates, action in edges:
        transitions.append(Transition(src, dst, _split_guard(guard, clock_names), tuple(resets),
                                      tuple(updates), sync, polarity, action, epos))
    implied = {c: 0 for c in clock_names}
    for g in [loc.invariant for loc in locs] + [t.guard for t in transitions]:
        for a in g.clock_atoms:
            if a.clock in implied:
                implied[a.clock] = max(implied[a.clock], a.bound)
    decl = tuple((c, implied[c] if m is None else m) for c, m, _ in clocks)
    return TimedAutomaton(name, tuple(locs), decl, tuple(transitions), tuple(variables),
                          tuple(channels), pos)


def parse_automaton(text: str, source: str = "") -> TimedAutomaton:
    """Parse one automaton without validating it."""
    return _ModelParser(text, source).parse()


def parse_model(sources: Iterable, validate: bool = True) -> Network:
    """Parse one automaton per source into a network.

    ``sources`` holds :class:`ModelSource` objects or plain strings.
    Raises :class:`ParseError` on syntax errors and :class:`ValidationFailed`
    when the model breaks a well-formedness rule.
    """
    automata = []
    for i, src in enumerate(sources):
        if isinstance(src, ModelSource):
            automata.append(parse_automaton(src.text, src.path))
        else:
            automata.append(parse_automaton(src, f"<source {i + 1}>"))
    net = Network.of(automata)
    if validate:
        diags = validate_model(net)
        if diags:
            raise ValidationFailed(diags)
    return net


def load_model(paths: Sequence[str]) -> Network:
    return parse_model([ModelSource.read(p) for p in paths])


def render_guard(guard: Guard) -> str:
    return str(guard)


def render_automaton(ta: TimedAutomaton) -> str:
    out = [f"automaton {ta.name};"]
    for c, m in ta.clocks:
        out.append(f"clock {c} max {m};")
    for v in ta.variables:
        out.append(f"int {v.name} = {v.initial} range [{v.low}, {v.high}];")
    for ch in ta.channels:
        out.append(f"channel {ch};")
    for loc in ta.locations:
        line = f"location {loc.name}"
        if loc.initial:
            line += " initial"
        if loc.urgent:
            line += " urgent"
        if not loc.invariant.is_true:
            line += f" invariant {render_guard(loc.invariant)}"
        out.append(line + ";")
    for t in ta.transitions:
        body = []
        if not t.guard.is_true:
            body.append(f"guard {render_guard(t.guard)};")
        if t.sync is not None:
            body.append(f"sync {t.sync}{t.polarity};")
        if t.resets:
            body.append(f"reset {', '.join(t.resets)};")
        if t.updates:
            body.append("do " + ", ".join(str(u) for u in t.updates) + ";")
        if t.action:
            body.append(f"action {t.action};")
        out.append(f"edge {t.source} -> {t.target} {{ " + " ".join(body) + " }")
    return "\n".join(out) + "\n"


def render_model(model) -> list:
    """One source text per component."""
    if isinstance(model, TimedAutomaton):
        return [render_automaton(model)]
    return [render_automaton(ta) for ta in model.components]


# ---------------------------------------------------------------------------
# queries

def parse_query(text: str, model) -> Query:
    if isinstance(model, TimedAutomaton):
        model = Network.of([model])
    p = _Parser(text, "<query>")
    p.expect("E<>")
    p.expect("(")
    atoms = [_query_atom(p, model)]
    while p.accept("&&"):
        atoms.append(_query_atom(p, model))
    p.expect(")")
    if p.tok.kind != "eof":
        p.error("unexpected text after the query")
    return Query(tuple(atoms))


def _query_atom(p: _Parser, net: Network):
    if p.at("true") or p.at("false"):
        return BoolAtom(p.name().text == "true")
    tok = p.tok
    if tok.kind == "name" and p.peek().text == "." and p.peek(2).kind == "name":
        comp, loc = tok.text, p.peek(2).text
        p.i += 3
        if comp not in net.component_index:
            raise ParseError(f"unknown component {comp!r}", tok.pos)
        index = net.component_index[comp]
        if loc not in net.components[index].location_map:
            raise ParseError(f"unknown location {comp}.{loc}", tok.pos)
        return LocationAtom(comp, loc, index)
    left = p.expr()
    rel = p.relation()
    right = p.expr()
    for v in left.variables() + right.variables():
        if v not in net.variable_map:
            raise ParseError(f"unknown integer variable {v!r}", tok.pos)
    return IntConstraint(left, rel, right, tok.pos)


# ---------------------------------------------------------------------------
# region patterns

def parse_pattern(text: str, model: TimedAutomaton) -> RegionPattern:
    """Read a ``.pat`` file.

    Lines::

        location q0
        x1 = 1
        x3 in (0, 1)
        y > max
        order unbounded: [x2] < [y]
        order frac: [x3]
    """
    if isinstance(model, Network):
        if len(model.components) != 1:
            raise ModelError("patterns need a single automaton")
        model = model.components[0]
    location = None
    constraints = []
    orders = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].split("#", 1)[0].strip()
        if not line:
            continue
        p = _Parser(line, f"<pattern line {lineno}>")
        if p.accept("location"):
            location = p.name("a location").text
        elif p.at("order"):
            p.i += 1
            which = p.name("'unbounded' or 'frac'")
            if which.text not in ("unbounded", "frac"):
                p.error("expected 'unbounded' or 'frac'", which)
            p.expect(":")
            groups = [_group(p)]
            while p.accept("<"):
                groups.append(_group(p))
            orders[which.text] = tuple(groups)
        else:
            clock = p.name("a clock").text
            if p.accept("="):
                constraints.append((clock, "eq", p.integer()))
            elif p.accept("in"):
                p.expect("(")
                lo = p.integer()
                p.expect(",")
                hi = p.integer()
                if p.accept("+"):
                    hi += p.integer()
                p.expect(")")
                if hi != lo + 1:
                    raise ParseError("interval must be (c, c+1)", p.tok.pos)
                constraints.append((clock, "open", lo))
            elif p.accept(">"):
                p.expect("max")
                constraints.append((clock, "unbounded", None))
            else:
                p.error("expected '=', 'in' or '> max'")
        if p.tok.kind != "eof":
            p.error("unexpected text")
    if location is None:
        raise ParseError("pattern has no 'location' line")
    pattern = RegionPattern(location, tuple(constraints), orders.get("unbounded"),
                            orders.get("frac"))
    problems = pattern.check(model)
    if problems:
        raise ModelError("; ".join(problems))
    return pattern


def _group(p: _Parser) -> tuple:
    p.expect("[")
    names = [p.name("a clock").text]
    while p.accept(","):
        names.append(p.name("a clock").text)
    p.expect("]")
    return tuple(names)


def render_pattern(pattern: RegionPattern) -> str:
    out = [f"location {pattern.location}"]
    for clock, kind, value in pattern.constraints:
        if kind == "eq":
            out.append(f"{clock} = {value}")
        elif kind == "open":
            out.append(f"{clock} in ({value}, {value + 1})")
        else:
            out.append(f"{clock} > max")
    for name, order in (("unbounded", pattern.unbounded_order), ("frac", pattern.frac_order)):
        if order is not None:
            out.append(f"order {name}: " + " < ".join("[" + ", ".join(g) + "]" for g in order))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# regions

_REGION = re.compile(r"^\{(?P<loc>\([^)]*\)|[^,{}]+)(?P<rest>.*)\}$", re.S)
_H = re.compile(r"h\(([^)]+)\)=(\d+)")
_SET = re.compile(r"X(-?\d+)=\{([^}]*)\}")


def parse_region(text: str, cmax) -> Region:
    """Inverse of :func:`region.render_region`."""
    m = _REGION.match(text.strip())
    if m is None:
        raise ParseError(f"not a region: {text!r}")
    loc = m.group("loc").strip()
    location = tuple(s.strip() for s in loc[1:-1].split(",")) if loc.startswith("(") else (loc,)
    rest = m.group("rest")
    h = {c.strip(): int(v) for c, v in _H.findall(rest)}
    sets = {}
    for idx, body in _SET.findall(rest):
        sets[int(idx)] = tuple(c.strip() for c in body.split(",") if c.strip())
    if 0 not in sets:
        raise ParseError(f"region without X0: {text!r}")
    ell = -min(min(sets), 0)
    r = max(max(sets), 0)
    if sorted(sets) != list(range(-ell, r + 1)):
        raise ParseError(f"set indices are not contiguous: {text!r}")
    unbounded = [sets[-i] for i in range(1, ell + 1)]
    for s in unbounded:
        for c in s:
            h[c] = cmax[c]
    region = Region(location, h, cmax, unbounded, sets[0], [sets[i] for i in range(1, r + 1)])
    try:
        return region.validate()
    except ValueError as exc:
        raise ParseError(str(exc)) from None


# ---------------------------------------------------------------------------
# stats

STATS_FIELDS = ("verdict", "regions_stored", "states_stored", "elapsed_ms", "strategy",
                "direction")


def stats_record(stats) -> dict:
    return {
        "verdict": stats.verdict,
        "regions_stored": stats.regions_stored,
        "states_stored": stats.states_stored,
        "elapsed_ms": round(stats.elapsed_ms, 3),
        "strategy": stats.strategy,
        "direction": stats.direction,
    }


def render_stats(stats, fmt: str = "text") -> str:
    rec = stats_record(stats)
    if fmt == "json":
        return json.dumps(rec, sort_keys=False)
    if fmt != "text":
        raise ValueError(f"unknown stats format {fmt!r}")
    lines = [
        f"verdict: {rec['verdict']}",
        f"regions stored: {rec['regions_stored']}",
        f"states stored: {rec['states_stored']}",
        f"elapsed: {rec['elapsed_ms']:.3f} ms",
        f"strategy: {rec['strategy']}",
        f"direction: {rec['direction']}",
    ]
    if getattr(stats, "message", None):
        lines.append(f"note: {stats.message}")
    return "\n".join(lines)
