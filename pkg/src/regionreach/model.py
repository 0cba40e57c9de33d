"""Timed automata, networks, guards and queries.

Everything here is an immutable value.  Constraint evaluation against
regions lives at the bottom of the module (``satisfies_guard`` and friends);
it only needs the integer part and the "status" of each clock, which the
region exposes through :meth:`Region.status`.
"""
from __future__ import annotations

import operator
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

RELATIONS = ("<", "<=", "==", ">=", ">")

_CMP = {
    "<": operator.lt,
    "<=": operator.le,
    "==": operator.eq,
    "!=": operator.ne,
    ">=": operator.ge,
    ">": operator.gt,
}

# Clock status inside a region.
IN_UNIT = "unit"
FRACTIONAL = "frac"
UNBOUNDED = "unbounded"


class ModelError(Exception):
    """Raised when a model, guard or query refers to something undeclared."""


class VerificationError(Exception):
    """A run-time error while exploring, e.g. an integer leaving its range."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class Position:
    line: int
    column: int
    source: str = ""

    def __str__(self):
        prefix = f"{self.source}:" if self.source else ""
        return f"{prefix}{self.line}:{self.column}"


# ---------------------------------------------------------------------------
# integer expressions

@dataclass(frozen=True)
class Const:
    value: int

    def eval(self, env: Mapping[str, int]) -> int:
        return self.value

    def variables(self):
        return ()

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Var:
    name: str
    pos: Optional[Position] = field(default=None, compare=False, repr=False)

    def eval(self, env: Mapping[str, int]) -> int:
        try:
            return env[self.name]
        except KeyError:
            raise ModelError(f"unknown integer variable {self.name!r}") from None

    def variables(self):
        return (self.name,)

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def eval(self, env: Mapping[str, int]) -> int:
        a = self.left.eval(env)
        b = self.right.eval(env)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        raise ModelError(f"unsupported operator {self.op!r}")

    def variables(self):
        return self.left.variables() + self.right.variables()

    def __str__(self):
        right = str(self.right)
        if isinstance(self.right, BinOp):
            right = f"({right})"
        left = str(self.left)
        if isinstance(self.left, BinOp) and self.op == "*" and self.left.op != "*":
            left = f"({left})"
        return f"{left} {self.op} {right}"


@dataclass(frozen=True)
class Neg:
    operand: object

    def eval(self, env):
        return -self.operand.eval(env)

    def variables(self):
        return self.operand.variables()

    def __str__(self):
        inner = str(self.operand)
        if isinstance(self.operand, BinOp):
            inner = f"({inner})"
        return f"-{inner}"


# ---------------------------------------------------------------------------
# constraints

@dataclass(frozen=True)
class ClockConstraint:
    """``clock relation bound`` with a non-negative integer bound."""

    clock: str
    relation: str
    bound: int
    pos: Optional[Position] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ModelError(f"bad clock relation {self.relation!r}")
        if self.bound < 0:
            raise ModelError(f"negative clock bound in {self}")

    def holds(self, value) -> bool:
        """Evaluate on a concrete (rational) clock value."""
        return _CMP[self.relation](value, self.bound)

    def renamed(self, name: str) -> "ClockConstraint":
        return replace(self, clock=name)

    def __str__(self):
        return f"{self.clock} {self.relation} {self.bound}"


@dataclass(frozen=True)
class IntConstraint:
    left: object
    relation: str
    right: object
    pos: Optional[Position] = field(default=None, compare=False, repr=False)

    def holds(self, env: Mapping[str, int]) -> bool:
        return _CMP[self.relation](self.left.eval(env), self.right.eval(env))

    def variables(self):
        return self.left.variables() + self.right.variables()

    def __str__(self):
        return f"{self.left} {self.relation} {self.right}"


@dataclass(frozen=True)
class Guard:
    """Conjunction of clock and integer atoms.  Empty means ``true``."""

    clock_atoms: tuple = ()
    int_atoms: tuple = ()

    @property
    def is_true(self) -> bool:
        return not self.clock_atoms and not self.int_atoms

    def atoms_on(self, clock: str):
        return [a for a in self.clock_atoms if a.clock == clock]

    def __str__(self):
        parts = [str(a) for a in self.clock_atoms] + [str(a) for a in self.int_atoms]
        return " && ".join(parts) if parts else "true"


TRUE = Guard()


@dataclass(frozen=True)
class Update:
    variable: str
    expr: object
    pos: Optional[Position] = field(default=None, compare=False, repr=False)

    def __str__(self):
        return f"{self.variable} := {self.expr}"


@dataclass(frozen=True)
class Transition:
    source: str
    target: str
    guard: Guard = TRUE
    resets: tuple = ()
    updates: tuple = ()
    sync: Optional[str] = None
    # "!" emits, "?" receives
    polarity: Optional[str] = None
    action: str = ""
    pos: Optional[Position] = field(default=None, compare=False, repr=False)

    @property
    def label(self) -> str:
        if self.action:
            return self.action
        return f"{self.source}->{self.target}"


@dataclass(frozen=True)
class Location:
    name: str
    initial: bool = False
    urgent: bool = False
    invariant: Guard = TRUE
    pos: Optional[Position] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class IntVariable:
    name: str
    initial: int
    low: int
    high: int
    pos: Optional[Position] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class TimedAutomaton:
    name: str
    locations: tuple
    clocks: tuple  # ((name, max constant), ...) in declaration order
    transitions: tuple = ()
    variables: tuple = ()
    channels: tuple = ()
    pos: Optional[Position] = field(default=None, compare=False, repr=False)

    @cached_property
    def max_constants(self) -> dict:
        return dict(self.clocks)

    @property
    def clock_names(self) -> tuple:
        return tuple(name for name, _ in self.clocks)

    @cached_property
    def location_map(self) -> dict:
        return {loc.name: loc for loc in self.locations}

    @property
    def initial_locations(self) -> tuple:
        return tuple(loc.name for loc in self.locations if loc.initial)

    def location(self, name: str) -> Location:
        try:
            return self.location_map[name]
        except KeyError:
            raise ModelError(f"{self.name}: unknown location {name!r}") from None

    @cached_property
    def outgoing(self) -> dict:
        out = {loc.name: [] for loc in self.locations}
        for t in self.transitions:
            out.setdefault(t.source, []).append(t)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def incoming(self) -> dict:
        inc = {loc.name: [] for loc in self.locations}
        for t in self.transitions:
            inc.setdefault(t.target, []).append(t)
        return {k: tuple(v) for k, v in inc.items()}

    def qualified(self) -> "TimedAutomaton":
        """Copy with every clock renamed ``Name.clock``."""
        rename = {c: f"{self.name}.{c}" for c in self.clock_names}

        def guard(g: Guard) -> Guard:
            return Guard(tuple(a.renamed(rename[a.clock]) if a.clock in rename else a
                               for a in g.clock_atoms), g.int_atoms)

        locations = tuple(replace(loc, invariant=guard(loc.invariant)) for loc in self.locations)
        transitions = tuple(
            replace(t, guard=guard(t.guard),
                    resets=tuple(rename.get(c, c) for c in t.resets))
            for t in self.transitions
        )
        clocks = tuple((rename[c], m) for c, m in self.clocks)
        return replace(self, locations=locations, transitions=transitions, clocks=clocks)


@dataclass(frozen=True)
class Network:
    components: tuple
    variables: tuple = ()
    channels: tuple = ()

    @classmethod
    def of(cls, automata: Iterable[TimedAutomaton]) -> "Network":
        """Compose automata, merging identical variable/channel declarations."""
        automata = tuple(automata)
        variables, seen = [], {}
        channels = []
        for ta in automata:
            for v in ta.variables:
                if v.name not in seen:
                    seen[v.name] = v
                    variables.append(v)
            for c in ta.channels:
                if c not in channels:
                    channels.append(c)
        return cls(automata, tuple(variables), tuple(channels))

    @cached_property
    def qualified(self) -> tuple:
        return tuple(ta.qualified() for ta in self.components)

    @cached_property
    def max_constants(self) -> dict:
        out = {}
        for ta in self.qualified:
            out.update(ta.max_constants)
        return out

    @property
    def clock_names(self) -> tuple:
        return tuple(c for ta in self.qualified for c in ta.clock_names)

    @cached_property
    def component_index(self) -> dict:
        return {ta.name: i for i, ta in enumerate(self.components)}

    @cached_property
    def variable_map(self) -> dict:
        return {v.name: v for v in self.variables}

    def initial_valuation(self) -> tuple:
        return tuple(v.initial for v in self.variables)

    def variable_names(self) -> tuple:
        return tuple(v.name for v in self.variables)

    def env(self, values: Sequence[int]) -> dict:
        return dict(zip(self.variable_names(), values))


# ---------------------------------------------------------------------------
# queries

@dataclass(frozen=True)
class LocationAtom:
    component: str
    location: str
    index: int = -1

    def __str__(self):
        return f"{self.component}.{self.location}"


@dataclass(frozen=True)
class BoolAtom:
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


@dataclass(frozen=True)
class Query:
    """``E<> (atom && atom && ...)``."""

    atoms: tuple

    def __str__(self):
        return "E<> (" + " && ".join(str(a) for a in self.atoms) + ")"


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class Diagnostic:
    message: str
    pos: Optional[Position] = None
    component: str = ""

    def __str__(self):
        where = f"{self.pos}: " if self.pos else ""
        comp = f"[{self.component}] " if self.component else ""
        return f"{where}{comp}{self.message}"


def _check_expr_vars(expr, declared, diags, comp, pos):
    for name in expr.variables():
        if name not in declared:
            diags.append(Diagnostic(f"unknown integer variable {name!r}", pos, comp))


def _check_guard(guard: Guard, ta: TimedAutomaton, declared, diags, pos):
    cmax = ta.max_constants
    for atom in guard.clock_atoms:
        where = atom.pos or pos
        if atom.clock not in cmax:
            diags.append(Diagnostic(f"unknown clock {atom.clock!r}", where, ta.name))
        elif atom.bound > cmax[atom.clock]:
            diags.append(Diagnostic(
                f"constant exceeds maximum: {atom} but max({atom.clock}) = {cmax[atom.clock]}",
                where, ta.name))
    for atom in guard.int_atoms:
        _check_expr_vars(atom.left, declared, diags, ta.name, atom.pos or pos)
        _check_expr_vars(atom.right, declared, diags, ta.name, atom.pos or pos)


def validate_automaton(ta: TimedAutomaton, declared=None) -> list:
    diags = []
    if declared is None:
        declared = {v.name for v in ta.variables}
    names = [n for n, _ in ta.clocks]
    for name in sorted({n for n in names if names.count(n) > 1}):
        diags.append(Diagnostic(f"clock {name!r} declared twice", ta.pos, ta.name))
    for name, m in ta.clocks:
        if m < 0:
            diags.append(Diagnostic(f"negative maximum constant for {name!r}", ta.pos, ta.name))
    if not ta.locations:
        diags.append(Diagnostic("automaton has no locations", ta.pos, ta.name))
    elif not ta.initial_locations:
        diags.append(Diagnostic("no initial location", ta.pos, ta.name))
    locs = [loc.name for loc in ta.locations]
    for name in sorted({n for n in locs if locs.count(n) > 1}):
        diags.append(Diagnostic(f"location {name!r} declared twice", ta.pos, ta.name))
    for loc in ta.locations:
        inv = loc.invariant
        if inv.int_atoms:
            diags.append(Diagnostic(
                f"invariant of {loc.name!r} must only constrain clocks", loc.pos, ta.name))
        for atom in inv.clock_atoms:
            if atom.relation not in ("<", "<="):
                diags.append(Diagnostic(
                    f"invariant must be an upper bound: {atom}", atom.pos or loc.pos, ta.name))
        _check_guard(inv, ta, declared, diags, loc.pos)
    channels = set(ta.channels)
    cmax = ta.max_constants
    for t in ta.transitions:
        for end in (t.source, t.target):
            if end not in ta.location_map:
                diags.append(Diagnostic(f"unknown location {end!r}", t.pos, ta.name))
        _check_guard(t.guard, ta, declared, diags, t.pos)
        for c in t.resets:
            if c not in cmax:
                diags.append(Diagnostic(f"reset of unknown clock {c!r}", t.pos, ta.name))
        for u in t.updates:
            if u.variable not in declared:
                diags.append(Diagnostic(
                    f"update of unknown integer variable {u.variable!r}", u.pos or t.pos, ta.name))
            _check_expr_vars(u.expr, declared, diags, ta.name, u.pos or t.pos)
        if t.sync is not None:
            if t.polarity not in ("!", "?"):
                diags.append(Diagnostic(f"bad sync polarity {t.polarity!r}", t.pos, ta.name))
            if t.sync not in channels:
                diags.append(Diagnostic(f"unknown channel {t.sync!r}", t.pos, ta.name))
    for v in ta.variables:
        if not v.low <= v.initial <= v.high:
            diags.append(Diagnostic(
                f"initial value of {v.name!r} outside [{v.low},{v.high}]", v.pos, ta.name))
    return diags


def validate_model(model) -> list:
    """Return one diagnostic per violated well-formedness rule (empty if valid)."""
    if isinstance(model, TimedAutomaton):
        model = Network.of([model])
    diags = []
    declared = {v.name for v in model.variables}
    seen_vars = {}
    for ta in model.components:
        for v in ta.variables:
            prev = seen_vars.setdefault(v.name, v)
            if (prev.initial, prev.low, prev.high) != (v.initial, v.low, v.high):
                diags.append(Diagnostic(
                    f"conflicting declarations of integer variable {v.name!r}", v.pos, ta.name))
        diags.extend(validate_automaton(ta, declared))
    names = [ta.name for ta in model.components]
    for name in sorted({n for n in names if names.count(n) > 1}):
        diags.append(Diagnostic(f"duplicate automaton name {name!r}"))
    clocks = model.clock_names
    for name in sorted({c for c in clocks if clocks.count(c) > 1}):
        diags.append(Diagnostic(f"clock {name!r} is not globally unique"))
    return diags


# ---------------------------------------------------------------------------
# evaluation against regions

def clock_atom_holds(status: str, h: int, atom: ClockConstraint) -> bool:
    """Decide ``atom`` for a clock with integer part ``h`` and given status."""
    c = atom.bound
    rel = atom.relation
    if rel == "==":
        return status == IN_UNIT and h == c
    if rel == "<":
        return status != UNBOUNDED and h < c
    if rel == "<=":
        return (status == IN_UNIT and h <= c) or (status == FRACTIONAL and h < c)
    if rel == ">":
        return (status == UNBOUNDED or (status == FRACTIONAL and h >= c)
                or (status == IN_UNIT and h > c))
    # ">="
    return status == UNBOUNDED or h >= c


def satisfies_clock_atoms(region, atoms) -> bool:
    for atom in atoms:
        try:
            status = region.status(atom.clock)
        except KeyError:
            raise ModelError(f"unknown clock {atom.clock!r}") from None
        if not clock_atom_holds(status, region.h[atom.clock], atom):
            return False
    return True


def satisfies_guard(region, env: Mapping[str, int], guard: Guard) -> bool:
    if not satisfies_clock_atoms(region, guard.clock_atoms):
        return False
    return all(atom.holds(env) for atom in guard.int_atoms)


def satisfies_invariant(region, automata: Sequence[TimedAutomaton], locations=None) -> bool:
    """Conjunction of the invariants of every component's current location.

    ``automata`` must use the same clock names as ``region`` (qualified
    components for product regions).
    """
    if locations is None:
        locations = region.location
    for ta, loc in zip(automata, locations):
        inv = ta.location(loc).invariant
        if inv.clock_atoms and not satisfies_clock_atoms(region, inv.clock_atoms):
            return False
    return True


def eval_query(query: Query, state, network: Optional[Network] = None) -> bool:
    env = None
    for atom in query.atoms:
        if isinstance(atom, BoolAtom):
            if not atom.value:
                return False
        elif isinstance(atom, LocationAtom):
            index = atom.index
            if index < 0:
                if network is None:
                    raise ModelError(f"unresolved location atom {atom}")
                index = network.component_index[atom.component]
            if state.region.location[index] != atom.location:
                return False
        else:
            if env is None:
                if network is None:
                    raise ModelError("integer atoms need the network's variable names")
                env = network.env(state.vars)
            if not atom.holds(env):
                return False
    return True


def apply_updates(updates: Sequence[Update], env: dict, network: Network) -> dict:
    """Left-to-right assignment; leaving a declared range is an error."""
    env = dict(env)
    vmap = network.variable_map
    for u in updates:
        value = u.expr.eval(env)
        decl = vmap.get(u.variable)
        if decl is None:
            raise ModelError(f"unknown integer variable {u.variable!r}")
        if not decl.low <= value <= decl.high:
            raise VerificationError(
                f"{u.variable} := {value} outside range [{decl.low},{decl.high}]")
        env[u.variable] = value
    return env
