import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regionreach.kinematics import (RegionPattern, delay_predecessor_skip, delay_predecessors,
                                    discrete_predecessors_over, discrete_successor,
                                    enumerate_pattern, find_discrete_predecessors,
                                    find_discrete_successors, find_immediate_delay_predecessors,
                                    immediate_delay_successor, ordered_partitions, part_regs,
                                    period)
from regionreach.model import ClockConstraint, Guard, Location, TimedAutomaton, Transition
from regionreach.oracle import all_regions, brute_discrete_predecessors, fubini
from regionreach.region import Region, RegionClass, classify

from conftest import duality_violations, every_region, random_ta

C2 = {"x": 2, "y": 2}
R0 = Region("q", C2, C2, [["y"], ["x"]])
R1 = Region("q", C2, C2, [["y"]], ["x"])
R2 = Region("q", {"x": 1, "y": 2}, C2, [["y"]], [], [["x"]])


def guard(*atoms):
    return Guard(tuple(ClockConstraint(*a) for a in atoms))


# -- delay successor ----------------------------------------------------------

def test_delay_successor_examples():
    assert immediate_delay_successor(R1) == R0
    p = Region("q", {"x": 1}, {"x": 2}, [], [], [["x"]])
    assert immediate_delay_successor(p) == Region("q", {"x": 2}, {"x": 2}, [], ["x"])
    assert immediate_delay_successor(R0) is None


ALLOWED = {(RegionClass.Z, RegionClass.P), (RegionClass.Z, RegionClass.U),
           (RegionClass.P, RegionClass.Z), (RegionClass.P, RegionClass.M),
           (RegionClass.M, RegionClass.P)}


def test_class_transitions_and_no_self_loops():
    for r in every_region(3, 2):
        s = immediate_delay_successor(r)
        if s is None:
            assert classify(r) is RegionClass.U
            continue
        assert s != r
        assert (classify(r), classify(s)) in ALLOWED


# -- delay predecessors ---------------------------------------------------------

def test_delay_predecessor_examples():
    assert find_immediate_delay_predecessors(R0) == [R1]
    r3 = Region("q", {"x": 1, "y": 2}, C2, [["y"]], ["x"])
    r4 = Region("q", {"x": 1, "y": 2}, C2, [], ["x", "y"])
    r5 = Region("q", {"x": 1, "y": 2}, C2, [], ["y"], [["x"]])
    preds = find_immediate_delay_predecessors(R2)
    assert set(preds) == {r3, r4, r5}
    assert [classify(r) for r in (r3, r4, r5)] == [RegionClass.Z, RegionClass.Z, RegionClass.M]
    zero = Region("q", {"x": 0, "y": 0}, C2, [], ["x", "y"])
    assert find_immediate_delay_predecessors(zero) == []


def test_delay_predecessor_bound_small():
    for r in every_region(3, 2):
        preds = find_immediate_delay_predecessors(r)
        assert len(preds) <= 3
        assert all(immediate_delay_successor(p) == r for p in preds)


def test_period_formula():
    assert period(Region("q", {"x": 0, "y": 1}, C2, [], ["x"], [["y"]])) == 4
    assert period(Region("q", {"x": 1}, {"x": 2}, [], [], [["x"]])) == 2
    three = {"a": 3, "b": 3, "c": 3}
    assert period(Region("q", {"a": 1, "b": 1, "c": 1}, three, [], [], [["a"], ["b"], ["c"]])) == 6
    with pytest.raises(ValueError):
        period(R1)


def _steps(r, n):
    for _ in range(n):
        preds = find_immediate_delay_predecessors(r)
        if len(preds) != 1:
            return None
        r = preds[0]
    return r


def test_period_skip_matches_single_steps():
    cm = {"x": 4, "y": 4, "z": 4}
    checked = 0
    for r in all_regions("q", cm):
        if r.unbounded or not r.fractional:
            continue
        theta = period(r)
        for n in range(0, 3 * theta + 2):
            skipped = delay_predecessor_skip(r, n)
            if skipped is None:
                continue
            rest = n - (n // theta) * theta
            direct = _steps(r, n)
            if direct is None:
                continue
            assert _steps(skipped, rest) == direct
            assert delay_predecessors(r, n) == [direct]
            checked += 1
    assert checked > 100


def test_skip_identity_and_fallback():
    r = Region("q", {"x": 1, "y": 2}, {"x": 3, "y": 3}, [], ["x"], [["y"]])
    assert delay_predecessor_skip(r, 3) == r
    assert delay_predecessor_skip(r, 4) is None  # x would hit exact zero
    r2 = Region("q", {"x": 2, "y": 2}, {"x": 3, "y": 3}, [], ["x"], [["y"]])
    assert delay_predecessor_skip(r2, 4) == Region("q", {"x": 1, "y": 1}, {"x": 3, "y": 3}, [], ["x"], [["y"]])


# -- discrete ------------------------------------------------------------------

def _ta(clocks, edges, locs=("q0", "q")):
    return TimedAutomaton("A", tuple(Location(l, initial=(i == 0)) for i, l in enumerate(locs)),
                          tuple(clocks), tuple(edges))


def test_flower_loop_resets_clock():
    ta = _ta([("x1", 1), ("y", 1)], [Transition("q0", "q0", guard(("x1", "==", 1)), ("x1",))],
             locs=("q0",))
    r = Region("q0", {"x1": 1, "y": 1}, ta.max_constants, [], ["x1", "y"])
    assert find_discrete_successors(r, ta) == [Region("q0", {"x1": 0, "y": 1}, ta.max_constants,
                                                      [], ["x1", "y"])]
    half = Region("q0", {"x1": 0, "y": 0}, ta.max_constants, [], [], [["x1", "y"]])
    assert find_discrete_successors(half, ta) == []


def test_unbounded_guard_successor():
    cm = {"x": 5, "y": 5, "z": 5, "w": 5}
    ta = _ta(list(cm.items()), [Transition("q", "q2", guard(("z", ">", 5)), ("w",))],
             locs=("q", "q2"))
    ex1 = Region("q", {"x": 2, "y": 2, "z": 5, "w": 5}, cm, [["z"], ["w"]], [], [["x", "y"]])
    want = Region("q2", {"x": 2, "y": 2, "z": 5, "w": 0}, cm, [["z"]], ["w"], [["x", "y"]])
    assert find_discrete_successors(ex1, ta) == [want]


def test_six_clock_predecessor_example():
    cm = {c: 5 for c in "xywpzs"}
    g = guard(("x", ">=", 0), ("y", ">=", 1), ("w", ">", 5), ("p", "==", 1), ("z", ">", 3),
              ("s", ">", 4))
    t = Transition("q0", "q", g, ("x", "y", "w", "p"))
    ta = _ta(cm.items(), [t])
    target = Region("q", {"x": 0, "y": 0, "w": 0, "p": 0, "z": 4, "s": 4}, cm, [],
                    ["x", "y", "w", "p"], [["z"], ["s"]])
    want = Region("q0", {"x": 3, "y": 2, "w": 5, "p": 1, "z": 4, "s": 4}, cm, [["w"]], ["p"],
                  [["z"], ["x", "y"], ["s"]])
    preds = find_discrete_predecessors(target, ta)
    assert want in preds
    assert all(discrete_successor(p, t, ta) == target for p in preds)


def test_no_reset_predecessor_is_relocation():
    cm = {"x": 2}
    t = Transition("q0", "q", guard(("x", "<", 2)))
    ta = _ta(cm.items(), [t])
    r = Region("q", {"x": 1}, cm, [], [], [["x"]])
    assert find_discrete_predecessors(r, ta) == [r.replace(location=("q0",))]


def test_single_clock_reset_has_four_predecessors():
    cm = {"x": 1}
    t = Transition("q0", "q", guard(("x", ">=", 0)), ("x",))
    ta = _ta(cm.items(), [t])
    zero = Region("q", {"x": 0}, cm, [], ["x"])
    preds = find_discrete_predecessors(zero, ta)
    assert len(preds) == 4
    nonzero = Region("q", {"x": 0}, cm, [], [], [["x"]])
    assert find_discrete_predecessors(nonzero, ta) == []


# -- part_regs / patterns ---------------------------------------------------------

def test_part_regs_examples():
    cm = {"a": 3, "b": 3}
    base = Region("q", {"a": 0, "b": 0}, cm, [], ["a", "b"])
    assert part_regs(base, 1, 0, [], {}) == [base]
    got = part_regs(Region("q", {}, cm, [], []), 1, 0, ["a", "b"], {"a": 1, "b": 2})
    assert len(got) == 3
    one = part_regs(Region("q", {}, cm, [], []), 0, 0, ["a"], {"a": 3})
    assert len(one) == 1 and one[0].unit == ("a",)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_part_regs_fubini(k):
    clocks = [f"c{i}" for i in range(k)]
    h = {c: i for i, c in enumerate(clocks)}
    cm = {c: k + 1 for c in clocks}
    got = part_regs(Region("q", {}, cm, [], []), 1, 0, clocks, h)
    assert len(got) == fubini(k)
    assert len(list(ordered_partitions(clocks))) == fubini(k)


def _flower_pattern(order):
    from regionreach.bench import gen_flower
    ta = gen_flower(4)
    cons = (("x1", "eq", 1), ("x2", "unbounded", None), ("x3", "eq", 0), ("x4", "eq", 0),
            ("y", "unbounded", None))
    return ta, RegionPattern("q0", cons, order)


def test_pattern_expansion():
    ta, p1 = _flower_pattern((("x2", "y"),))
    (r1,) = enumerate_pattern(p1, ta)
    assert r1.unbounded == (("x2", "y"),) and r1.unit == ("x1", "x3", "x4")
    _, p2 = _flower_pattern((("y",), ("x2",)))
    (r2,) = enumerate_pattern(p2, ta)
    assert r2.unbounded == (("y",), ("x2",))
    _, free = _flower_pattern(None)
    assert len(enumerate_pattern(free, ta)) == 3


def test_incomplete_pattern_diagnostic():
    ta, p = _flower_pattern(None)
    broken = RegionPattern("q0", p.constraints[1:])
    diags = []
    assert enumerate_pattern(broken, ta, diags) == []
    assert any("x1" in d for d in diags)


# -- properties over random automata ----------------------------------------------

@settings(max_examples=40, deadline=None)
@given(random_ta())
def test_duality_random(ta):
    assert duality_violations(ta) == 0


@settings(max_examples=15, deadline=None)
@given(random_ta(max_clocks=2, max_locs=2, max_edges=3))
def test_predecessors_match_valuation_grid(ta):
    cm = ta.max_constants
    for t in ta.transitions:
        for r in all_regions(t.target, cm):
            assert discrete_predecessors_over(r, t, ta) == brute_discrete_predecessors(r, t, cm)
