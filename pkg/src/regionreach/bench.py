"""Generators for the flower, boolean, ring and gates benchmark families."""
from __future__ import annotations

from dataclasses import dataclass

from .model import (BinOp, ClockConstraint, Const, Guard, IntConstraint, IntVariable, Location,
                    Network, TimedAutomaton, Transition, Update, Var)
from .textio import render_automaton

FAMILIES = ("flower", "boolean", "ring", "gates")


def _eq(clock: str, c: int) -> Guard:
    return Guard((ClockConstraint(clock, "==", c),))


def gen_flower(n: int) -> TimedAutomaton:
    """``q0`` with one self-loop per clock ``xi == i``; Goal needs every ``xi`` at 0 and ``y >= 1``."""
    if n < 1:
        raise ValueError("flower needs n >= 1")
    clocks = tuple((f"x{i}", i) for i in range(1, n + 1)) + (("y", 1),)
    loops = tuple(Transition("q0", "q0", _eq(f"x{i}", i), (f"x{i}",))
                  for i in range(1, n + 1))
    goal = Guard(tuple(ClockConstraint(f"x{i}", "==", 0) for i in range(1, n + 1))
                 + (ClockConstraint("y", ">=", 1),))
    locations = (Location("q0", initial=True), Location("Goal"))
    return TimedAutomaton("Flower", locations, clocks, loops + (Transition("q0", "Goal", goal),))


def gen_boolean(k: int) -> Network:
    if k < 2:
        raise ValueError("boolean needs K >= 2")
    comps = []
    for i in range(1, k + 1):
        x, ctr = f"x{i}", f"ctr{i}"
        flip = (Update(ctr, BinOp("-", Const(1), Var(ctr))),)
        comps.append(TimedAutomaton(
            f"Boolean{i}",
            (Location("q0", initial=True), Location("q1")),
            ((x, i),),
            (Transition("q0", "q1", _eq(x, i), (x,), flip),
             Transition("q1", "q0", _eq(x, i), (x,), flip)),
            (IntVariable(ctr, 0, 0, 1),),
        ))
    return Network.of(comps)


def gen_ring(k: int) -> Network:
    if k < 2:
        raise ValueError("ring needs K >= 2")
    names = ["q0", "q1", "q2", "q3", "q4", "Goal"]
    comps = []
    for i in range(1, k + 1):
        x = f"x{i}"
        edges = tuple(Transition(names[j], names[(j + 1) % 6], _eq(x, i), (x,)) for j in range(6))
        locs = tuple(Location(name, initial=(name == "q0")) for name in names)
        comps.append(TimedAutomaton(f"P{i}", locs, ((x, i),), edges))
    return Network.of(comps)


def gen_gates(k: int) -> Network:
    """``K - 1`` keys bump ``gate`` on their last edge; the unlocker needs ``gate == K - 1``."""
    if k < 2:
        raise ValueError("gates needs K >= 2")
    gate = IntVariable("gate", 0, 0, k - 1)
    comps = []
    for i in range(1, k):
        x = f"x{i}"
        edges = []
        for j in range(i):
            if j < i - 1:
                edges.append(Transition(f"q{j}", f"q{j + 1}", _eq(x, i), (x,)))
            else:
                bump = (Update("gate", BinOp("+", Var("gate"), Const(1))),)
                edges.append(Transition(f"q{j}", f"q{j + 1}", _eq(x, i), (), bump))
        locs = tuple(Location(f"q{j}", initial=(j == 0)) for j in range(i + 1))
        comps.append(TimedAutomaton(f"Key{i}", locs, ((x, i),), tuple(edges), (gate,)))
    c = k - 1
    edges = [Transition(f"q{j}", f"q{j + 1}", _eq("x", c), ("x",)) for j in range(c)]
    last = Guard((ClockConstraint("x", "==", c),),
                 (IntConstraint(Var("gate"), "==", Const(c)),))
    edges.append(Transition(f"q{c}", "Goal", last))
    locs = tuple(Location(f"q{j}", initial=(j == 0)) for j in range(c + 1)) + (Location("Goal"),)
    comps.append(TimedAutomaton("Unlocker", locs, (("x", c),), tuple(edges), (gate,)))
    return Network.of(comps)


def canonical_query(family: str, k: int) -> str:
    if family == "flower":
        return "E<> (Flower.Goal)"
    if family == "boolean":
        return "E<> (" + " && ".join(f"ctr{i} == 1" for i in range(1, k + 1)) + ")"
    if family == "ring":
        return "E<> (" + " && ".join(f"P{i}.Goal" for i in range(1, k + 1)) + ")"
    if family == "gates":
        return "E<> (Unlocker.Goal)"
    raise ValueError(f"unknown family {family!r}")


@dataclass(frozen=True)
class Benchmark:
    family: str
    size: int
    model: Network
    query: str

    def sources(self) -> dict:
        """File name to DSL text, one file per component."""
        return {f"{ta.name}.ta": render_automaton(ta) for ta in self.model.components}


def generate(family: str, size: int) -> Benchmark:
    gens = {"flower": lambda n: Network.of([gen_flower(n)]), "boolean": gen_boolean,
            "ring": gen_ring, "gates": gen_gates}
    if family not in gens:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    return Benchmark(family, size, gens[family](size), canonical_query(family, size))
