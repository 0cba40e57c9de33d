from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regionreach.bench import gen_boolean, gen_flower
from regionreach.model import (BinOp, BoolAtom, ClockConstraint, Const, Guard, IntVariable,
                               LocationAtom, Location, Network, Query, TimedAutomaton,
                               Transition, Update, Var, VerificationError, apply_updates,
                               eval_query, satisfies_guard, satisfies_invariant, validate_model)
from regionreach.oracle import abstract, sample
from regionreach.region import Region, SearchState, initial_region

from conftest import RELS, every_region

WIDE_CM = {"x": 5, "y": 5, "z": 5, "w": 5}
# x, y in (2,3) with equal fractions; z then w unbounded
SAMPLE_P = Region("q", {"x": 2, "y": 2, "z": 5, "w": 5}, WIDE_CM, [["z"], ["w"]], [], [["x", "y"]])


def g(*atoms):
    return Guard(tuple(ClockConstraint(c, r, b) for c, r, b in atoms))


def test_flower_is_valid():
    assert validate_model(gen_flower(4)) == []


def test_constant_exceeding_max_is_reported():
    ta = TimedAutomaton("A", (Location("q", initial=True),), (("x", 5),),
                        (Transition("q", "q", g(("x", "<=", 7))),))
    msgs = [d.message for d in validate_model(ta)]
    assert any("constant exceeds maximum" in m for m in msgs)


def test_lower_bound_invariant_is_rejected():
    ta = TimedAutomaton("A", (Location("q", initial=True, invariant=g(("x", ">=", 1))),),
                        (("x", 5),))
    assert any("invariant must be an upper bound" in d.message for d in validate_model(ta))


def test_missing_initial_location():
    ta = TimedAutomaton("A", (Location("q"),), (("x", 1),))
    assert any("no initial location" in d.message for d in validate_model(ta))


@pytest.mark.parametrize("guard,expected", [
    (g(("x", ">", 2), ("z", ">", 5)), True),
    (g(("x", "==", 2)), False),
    (g(("w", "==", 5)), False),
    (g(("w", ">=", 5), ("y", "<", 3)), True),
])
def test_class_p_region_guards(guard, expected):
    assert satisfies_guard(SAMPLE_P, {}, guard) is expected


def test_invariants():
    ta = TimedAutomaton("A", (Location("q", initial=True, invariant=g(("x", "<=", 5))),),
                        (("x", 5),))
    r0 = initial_region(ta)
    assert satisfies_invariant(r0, [ta])
    unb = Region("q", {"x": 5}, {"x": 5}, [["x"]])
    assert not satisfies_invariant(unb, [ta])
    free = TimedAutomaton("B", (Location("q", initial=True),), (("x", 5),))
    assert satisfies_invariant(unb, [free])


def test_eval_query():
    net = gen_boolean(2)
    r = initial_region(net)
    hit = SearchState(r, (1, 1))
    from regionreach.textio import parse_query
    q = parse_query("E<> (ctr1 == 1 && ctr2 == 1)", net)
    assert eval_query(q, hit, net)
    assert not eval_query(q, SearchState(r, (1, 0)), net)
    assert not eval_query(Query((BoolAtom(False),)), hit, net)
    flower = Network.of([gen_flower(2)])
    s0 = SearchState(initial_region(flower), ())
    assert not eval_query(Query((LocationAtom("Flower", "Goal"),)), s0, flower)


def test_updates_are_left_to_right_and_range_checked():
    net = Network.of([TimedAutomaton("A", (Location("q", initial=True),), (("x", 1),),
                                     variables=(IntVariable("a", 0, 0, 3),
                                                IntVariable("b", 0, 0, 3)))])
    ups = (Update("a", Const(2)), Update("b", BinOp("+", Var("a"), Const(1))))
    assert apply_updates(ups, {"a": 0, "b": 0}, net) == {"a": 2, "b": 3}
    with pytest.raises(VerificationError):
        apply_updates((Update("a", Const(4)),), {"a": 0, "b": 0}, net)


# the decision table agrees with concrete values, exhaustively
def test_guard_table_matches_valuations():
    checked = 0
    for region in every_region(3, 2):
        v = sample(region)
        for c in region.h:
            for rel in RELS:
                for bound in range(region.cmax[c] + 1):
                    atom = ClockConstraint(c, rel, bound)
                    assert satisfies_guard(region, {}, Guard((atom,))) == atom.holds(v[c])
                    checked += 1
    assert checked > 10000


@settings(max_examples=200, deadline=None)
@given(st.lists(st.fractions(min_value=0, max_value=4, max_denominator=6), min_size=1, max_size=3),
       st.sampled_from(RELS), st.integers(0, 3))
def test_guard_uniform_on_abstraction(values, rel, bound):
    cmax = {f"c{i}": 3 for i in range(len(values))}
    val = {f"c{i}": Fraction(v) for i, v in enumerate(values)}
    tags = {c: i for i, c in enumerate(sorted(val))}
    region = abstract(val, "q", cmax, tags)
    for c in val:
        atom = ClockConstraint(c, rel, bound)
        assert satisfies_guard(region, {}, Guard((atom,))) == atom.holds(val[c])
